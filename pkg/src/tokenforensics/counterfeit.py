"""Counterfeit token discovery: identifier matching plus allowlist filtering.

A token counterfeits a target when its name or symbol either equals the
target's (identical) or embeds it among other characters (combo). Matching
runs on normalized text, so case, spacing and full-width forms do not hide
an imitation.
"""

from __future__ import annotations

import enum
import json
import unicodedata
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from .chain_store import Address, IndexedLedger, LabelSet

# target identifiers shorter than this must match at a word boundary
SHORT_IDENTIFIER = 4


class MatchStatus(str, enum.Enum):
    IDENTICAL = "identical"
    COMBO = "combo"
    UNRELATED = "unrelated"


class Verdict(str, enum.Enum):
    CONFIRMED = "confirmed"
    FILTERED_RULE1 = "filtered_rule1"
    FILTERED_RULE2 = "filtered_rule2"
    FILTERED_RULE3 = "filtered_rule3"
    NEEDS_REVIEW = "needs_review"


@dataclass(frozen=True)
class TargetToken:
    address: Address
    name: str
    symbol: str
    cap_rank: int

    def __post_init__(self):
        if not (self.name.strip() or self.symbol.strip()):
            raise ValueError(f"target {self.address} has neither name nor symbol")

    @classmethod
    def from_json(cls, obj: dict) -> "TargetToken":
        return cls(Address(obj["address"]), obj.get("name") or "", obj.get("symbol") or "", int(obj["cap_rank"]))

    def to_json(self) -> dict:
        return {"address": self.address, "name": self.name, "symbol": self.symbol, "cap_rank": self.cap_rank}


@dataclass(frozen=True)
class MatchClass:
    name_status: MatchStatus
    symbol_status: MatchStatus

    @property
    def is_match(self) -> bool:
        return self.name_status is not MatchStatus.UNRELATED or self.symbol_status is not MatchStatus.UNRELATED

    @property
    def is_type1(self) -> bool:
        return MatchStatus.IDENTICAL in (self.name_status, self.symbol_status)

    @property
    def is_type2(self) -> bool:
        return MatchStatus.COMBO in (self.name_status, self.symbol_status)


@dataclass(frozen=True)
class CounterfeitCandidate:
    token: Address
    target: TargetToken
    match: MatchClass
    creator: Address | None
    name: str = ""
    symbol: str = ""
    filter_verdict: Verdict = Verdict.CONFIRMED

    def with_verdict(self, verdict: Verdict) -> "CounterfeitCandidate":
        return CounterfeitCandidate(self.token, self.target, self.match, self.creator, self.name, self.symbol, verdict)

    def to_json(self) -> dict:
        return {
            "token": self.token,
            "name": self.name,
            "symbol": self.symbol,
            "creator": self.creator,
            "target": self.target.to_json(),
            "name_status": self.match.name_status.value,
            "symbol_status": self.match.symbol_status.value,
            "filter_verdict": self.filter_verdict.value,
        }


def load_targets(path) -> list[TargetToken]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return sorted((TargetToken.from_json(o) for o in data), key=lambda t: (t.cap_rank, t.address))


def normalize(identifier: str) -> str:
    """NFKC-fold, case-fold and collapse whitespace."""
    text = unicodedata.normalize("NFKC", identifier).casefold()
    return " ".join(text.split())


def _at_boundary(text: str, start: int, end: int) -> bool:
    before = text[start - 1] if start > 0 else ""
    after = text[end] if end < len(text) else ""
    return not before.isalnum() and not after.isalnum()


def contains_identifier(candidate: str, target: str) -> bool:
    """Normalized containment; short targets only count at word boundaries."""
    if not target:
        return False
    if len(target) >= SHORT_IDENTIFIER:
        return target in candidate
    start = candidate.find(target)
    while start != -1:
        if _at_boundary(candidate, start, start + len(target)):
            return True
        start = candidate.find(target, start + 1)
    return False


def _status(candidate_norm: str, target_norm: str) -> MatchStatus:
    if not target_norm or not candidate_norm:
        return MatchStatus.UNRELATED
    if candidate_norm == target_norm:
        return MatchStatus.IDENTICAL
    if contains_identifier(candidate_norm, target_norm):
        return MatchStatus.COMBO
    return MatchStatus.UNRELATED


def classify_match(candidate_name: str, candidate_symbol: str, target: TargetToken) -> MatchClass:
    return MatchClass(
        _status(normalize(candidate_name), normalize(target.name)),
        _status(normalize(candidate_symbol), normalize(target.symbol)),
    )


def scan(ledger: IndexedLedger, targets: Sequence[TargetToken], threads: int = 1) -> list[CounterfeitCandidate]:
    """Every ledger token matching a target, one candidate per (token, target).

    Results are ordered by (target cap_rank, token address) whatever the
    thread count.
    """
    if not targets:
        raise ValueError("scan needs at least one target")
    official = {t.address for t in targets}
    pool_tokens = [
        (tok, normalize(tok.name), normalize(tok.symbol))
        for tok in ledger.tokens()
        if tok.address not in official
    ]

    def for_target(target: TargetToken) -> list[CounterfeitCandidate]:
        t_name, t_symbol = normalize(target.name), normalize(target.symbol)
        out = []
        for tok, name, symbol in pool_tokens:
            m = MatchClass(_status(name, t_name), _status(symbol, t_symbol))
            if not m.is_match:
                continue
            out.append(CounterfeitCandidate(tok.address, target, m, ledger.creator_of(tok.address), tok.name, tok.symbol))
        return out

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(for_target, targets))
    else:
        chunks = [for_target(t) for t in targets]
    found = [c for chunk in chunks for c in chunk]
    found.sort(key=lambda c: (c.target.cap_rank, c.target.address, c.token))
    return found


def _verdict(c: CounterfeitCandidate, labels: LabelSet) -> Verdict:
    if c.token in labels.migrated_token_allowlist:
        return Verdict.FILTERED_RULE1
    if c.creator is not None and c.creator in labels.trusted_creators:
        return Verdict.FILTERED_RULE2
    if c.token in labels.official_token_allowlist:
        return Verdict.FILTERED_RULE3
    m = c.match
    if (
        m.symbol_status is MatchStatus.COMBO
        and m.name_status is MatchStatus.UNRELATED
        and len(normalize(c.target.symbol)) < SHORT_IDENTIFIER
    ):
        return Verdict.NEEDS_REVIEW
    return Verdict.CONFIRMED


@dataclass
class FilterResult:
    confirmed: list[CounterfeitCandidate]
    filtered: list[CounterfeitCandidate]
    needs_review: list[CounterfeitCandidate]

    def all(self) -> list[CounterfeitCandidate]:
        return sorted(
            self.confirmed + self.filtered + self.needs_review,
            key=lambda c: (c.target.cap_rank, c.target.address, c.token),
        )


def apply_filters(candidates: Iterable[CounterfeitCandidate], labels: LabelSet) -> FilterResult:
    result = FilterResult([], [], [])
    for c in candidates:
        v = _verdict(c, labels)
        c = c.with_verdict(v)
        if v is Verdict.CONFIRMED:
            result.confirmed.append(c)
        elif v is Verdict.NEEDS_REVIEW:
            result.needs_review.append(c)
        else:
            result.filtered.append(c)
    return result


def confirmed_tokens(candidates: Iterable[CounterfeitCandidate]) -> list[Address]:
    return sorted({c.token for c in candidates if c.filter_verdict is Verdict.CONFIRMED})


def lexical_table(candidates: Iterable[CounterfeitCandidate]) -> dict:
    """Per-token counts in the (symbol-only, name-only, both) x (combo, identical) layout.

    A token is counted once, using its strongest match across targets.
    """
    cells = {row: {"combo": 0, "identical": 0} for row in ("symbol", "name", "both")}
    best: dict[Address, MatchClass] = {}
    rank = {MatchStatus.UNRELATED: 0, MatchStatus.COMBO: 1, MatchStatus.IDENTICAL: 2}
    for c in candidates:
        cur = best.get(c.token)
        score = (rank[c.match.name_status] + rank[c.match.symbol_status], rank[c.match.name_status])
        if cur is None or score > (rank[cur.name_status] + rank[cur.symbol_status], rank[cur.name_status]):
            best[c.token] = c.match
    for m in best.values():
        for status in ("combo", "identical"):
            s = MatchStatus(status)
            n, y = m.name_status is s, m.symbol_status is s
            if n and y:
                cells["both"][status] += 1
            elif n:
                cells["name"][status] += 1
            elif y:
                cells["symbol"][status] += 1
    cells["sum"] = {k: sum(cells[r][k] for r in ("symbol", "name", "both")) for k in ("combo", "identical")}
    cells["all"] = len(best)
    return cells
