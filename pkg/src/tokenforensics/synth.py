"""Deterministic synthetic ledgers with planted counterfeit tokens and scams.

Every identity (address, tx hash) is a keyed hash of ``(seed, label)`` and
every random choice comes from a stream keyed by ``(seed, concern)``, so
changing one part of a scenario (say, the noise volume) leaves the rest of
the planted ground truth untouched.
"""

from __future__ import annotations

import hashlib
import json
import random
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from .chain_store.erc20 import selector_stub
from .chain_store.ingest import FILE_NAMES, LABELS_FILE
from .counterfeit import normalize
from .scams.config import WEI_PER_ETH, load_structured

GENESIS_TS = 1_577_836_800
BASE_BLOCK = 9_000_000
BLOCK_SECONDS = 12
BLOCKS_PER_DAY = 86_400 // BLOCK_SECONDS
ZERO = "0x" + "00" * 20

# phase start days on the synthetic timeline
AIRDROP_DAY = 1
ARBITRAGE_DAY = 20
LAUNDERING_DAY = 80
TIMELINE_DAYS = 100

# payout delay for arbitrage returns, in blocks (60 s .. 6,996 s)
RETURN_DELAY_BLOCKS = (5, 583)
# gap between a payout and the victim's next payment (> 2 h)
REPEAT_GAP_BLOCKS = (700, 2_000)

TARGET_CATALOGUE: list[tuple[int, str, str]] = [
    (1, "Tether USD", "USDT"),
    (2, "BNB", "BNB"),
    (3, "ChainLink Token", "LINK"),
    (4, "HuobiToken", "HT"),
    (5, "Bitfinex LEO Token", "LEO"),
    (6, "Crypto.com Coin", "CRO"),
    (8, "Maker", "MKR"),
    (9, "USD Coin", "USDC"),
    (10, "OKB", "OKB"),
    (13, "BAT", "BAT"),
    (14, "Paxos Standard", "PAX"),
    (15, "ZRX", "ZRX"),
    (17, "ICON", "ICX"),
    (18, "OMG Network", "OMG"),
    (20, "Baer Chain", "BRC"),
    (21, "ZBToken", "ZB"),
    (23, "TrueUSD", "TUSD"),
    (24, "HoloToken", "HOT"),
    (25, "Dai Stablecoin", "DAI"),
    (27, "Theta Token", "THETA"),
    (32, "Bytom", "BTM"),
    (33, "EnjinCoin", "ENJ"),
    (36, "IOSToken", "IOST"),
    (38, "Zilliqa", "ZIL"),
    (39, "KyberNetwork", "KNC"),
    (42, "Golem", "GNT"),
    (67, "QuarkChain Token", "QKC"),
    (76, "Polymath", "POLY"),
    (95, "Matic Token", "MATIC"),
    (96, "Decentraland", "MANA"),
]

MATCH_CLASSES = (
    "identical/identical",
    "identical/unrelated",
    "unrelated/identical",
    "combo/unrelated",
    "unrelated/combo",
    "combo/combo",
    "identical/combo",
    "combo/identical",
)

NAME_DECOR = ("{} Classic", "{} 2.0", "New {}", "{} Plus", "{} Cash", "{}_v2", "{} (Official)", "{} Airdrop")
SYMBOL_DECOR = ("{} Coin", "{}_huobi", "Token {}", "{}-2", "{} (new)", "{}.e", "x {}", "{} v2")
IDENTICAL_VARIANTS = ("{}", "{}", "{}", "lower", "upper", " {} ", "fullwidth")


class ScenarioError(ValueError):
    pass


@dataclass
class AirdropCampaign:
    victims: int
    rate: str = "1000"
    eth_per_victim: str = "1"
    decimals: int = 18
    target: Optional[str] = None
    # collector and distributor share one address unless set False
    shared_scam_address: bool = True


@dataclass
class ArbitrageCampaign:
    victims: int
    eth_min: str = "0.1"
    eth_max: str = "5"
    secondary_fraction: float = 0.0
    type2_fraction: float = 0.0
    no_return_fraction: float = 0.0
    scam_receivers: int = 1
    target: Optional[str] = None
    decimals: int = 18
    distributor_is_receiver: bool = False


@dataclass
class ScenarioConfig:
    seed: int = 0
    targets: int | list[str] = 0
    counterfeits: dict[str, int] = field(default_factory=dict)
    creators: int = 1
    factory_fraction: float = 0.0
    airdrop: list[AirdropCampaign] = field(default_factory=list)
    arbitrage: list[ArbitrageCampaign] = field(default_factory=list)
    noise_transactions: int = 0
    laundering_depth: int = 0
    exchanges: int = 0
    overlap_victims: int = 0
    filter_plants: int = 0

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> "ScenarioConfig":
        data = dict(data)
        data["airdrop"] = [AirdropCampaign(**c) for c in data.get("airdrop", [])]
        data["arbitrage"] = [ArbitrageCampaign(**c) for c in data.get("arbitrage", [])]
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ScenarioError(f"unknown scenario keys: {sorted(extra)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "ScenarioConfig":
        return cls.from_mapping(load_structured(path))

    def to_json(self) -> dict:
        return asdict(self)


def _check(cfg: ScenarioConfig) -> None:
    def nonneg(name: str, v: int) -> None:
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise ScenarioError(f"{name} must be a non-negative integer, got {v!r}")

    def frac(name: str, v: float) -> None:
        if not 0.0 <= float(v) <= 1.0:
            raise ScenarioError(f"{name} must lie in [0, 1], got {v!r}")

    if not 0 <= cfg.seed < 2**64:
        raise ScenarioError("seed must be a 64-bit unsigned integer")
    for k in ("creators", "noise_transactions", "laundering_depth", "exchanges", "overlap_victims", "filter_plants"):
        nonneg(k, getattr(cfg, k))
    frac("factory_fraction", cfg.factory_fraction)
    for k, v in cfg.counterfeits.items():
        if k not in MATCH_CLASSES:
            raise ScenarioError(f"unknown match class {k!r}; expected one of {MATCH_CLASSES}")
        nonneg(f"counterfeits[{k}]", v)
    for i, c in enumerate(cfg.airdrop):
        nonneg(f"airdrop[{i}].victims", c.victims)
        if not 0 <= c.decimals <= 77:
            raise ScenarioError(f"airdrop[{i}].decimals out of range: {c.decimals}")
        if Fraction(c.rate) <= 0 or Decimal(c.eth_per_victim) <= 0:
            raise ScenarioError(f"airdrop[{i}]: rate and eth_per_victim must be positive")
        wei = Decimal(c.eth_per_victim) * WEI_PER_ETH
        if wei != wei.to_integral_value():
            raise ScenarioError(f"airdrop[{i}].eth_per_victim is finer than 1 wei")
        amount = Fraction(int(wei)) * Fraction(c.rate) * 10**c.decimals / WEI_PER_ETH
        if amount.denominator != 1:
            raise ScenarioError(f"airdrop[{i}]: token payout is not a whole number of raw units")
    for i, c in enumerate(cfg.arbitrage):
        nonneg(f"arbitrage[{i}].victims", c.victims)
        if not 0 <= c.decimals <= 77:
            raise ScenarioError(f"arbitrage[{i}].decimals out of range: {c.decimals}")
        for k in ("secondary_fraction", "type2_fraction", "no_return_fraction"):
            frac(f"arbitrage[{i}].{k}", getattr(c, k))
        if c.secondary_fraction + c.type2_fraction + c.no_return_fraction > 1.0 + 1e-9:
            raise ScenarioError(f"arbitrage[{i}]: victim fractions sum above 1")
        if c.scam_receivers < 1:
            raise ScenarioError(f"arbitrage[{i}].scam_receivers must be >= 1")
        lo, hi = Decimal(c.eth_min), Decimal(c.eth_max)
        if not Decimal("0.01") <= lo <= hi:
            raise ScenarioError(f"arbitrage[{i}]: need 0.01 <= eth_min <= eth_max")
    if cfg.overlap_victims:
        if not cfg.airdrop or not cfg.arbitrage:
            raise ScenarioError("overlap_victims needs an airdrop and an arbitrage campaign")
        if cfg.overlap_victims > min(cfg.airdrop[0].victims, cfg.arbitrage[0].victims):
            raise ScenarioError("overlap_victims exceeds campaign sizes")
    if cfg.laundering_depth and not cfg.exchanges:
        raise ScenarioError("laundering needs at least one exchange")


def safe_catalogue() -> list[tuple[int, str, str]]:
    """Catalogue entries whose identifiers never contain one another."""
    kept: list[tuple[int, str, str]] = []
    ids: list[set[str]] = []
    for rank, name, symbol in TARGET_CATALOGUE:
        mine = {normalize(name), normalize(symbol)} - {""}
        clash = any(a in b or b in a for other in ids for a in mine for b in other)
        if not clash:
            kept.append((rank, name, symbol))
            ids.append(mine)
    return kept


def _select_targets(wanted: int | list[str]) -> list[tuple[int, str, str]]:
    cat = safe_catalogue()
    if isinstance(wanted, int):
        if wanted < 0 or wanted > len(cat):
            raise ScenarioError(f"targets must be in [0, {len(cat)}]")
        return cat[:wanted]
    by_symbol = {s.upper(): e for e in cat for s in (e[2],)}
    out = []
    for sym in wanted:
        if sym.upper() not in by_symbol:
            raise ScenarioError(f"unknown target symbol {sym!r}")
        out.append(by_symbol[sym.upper()])
    return sorted(set(out))


class _Chain:
    """Accumulates ledger rows; block numbers double as the time axis."""

    def __init__(self, seed: int):
        self.seed = seed
        self.txs: list[tuple[int, int, dict]] = []
        self.internals: list[dict] = []
        self.contracts: list[dict] = []
        self.transfers: dict[str, list[dict]] = defaultdict(list)
        self.metadata: list[dict] = []
        self.blocks: set[int] = set()
        self._seq = 0
        self.balances: dict[tuple[str, str], int] = defaultdict(int)

    def _digest(self, kind: str, label: str, n: int) -> str:
        return "0x" + hashlib.sha256(f"{self.seed}|{kind}|{label}".encode()).hexdigest()[: 2 * n]

    def addr(self, label: str) -> str:
        return self._digest("addr", label, 20)

    def txhash(self, label: str) -> str:
        return self._digest("tx", label, 32)

    def rng(self, concern: str) -> random.Random:
        h = hashlib.sha256(f"{self.seed}|rng|{concern}".encode()).digest()
        return random.Random(int.from_bytes(h[:8], "big"))

    def tx(self, label: str, block: int, sender: str, to: Optional[str], value_wei: int = 0, input_hex: str = "0x") -> str:
        h = self.txhash(label)
        self.blocks.add(block)
        self._seq += 1
        self.txs.append(
            (block, self._seq, {"hash": h, "block": block, "from": sender, "to": to, "value_wei": str(value_wei), "input": input_hex, "status": True})
        )
        return h

    def internal(self, parent: str, index: int, sender: str, to: str, value_wei: int, call_type: str = "call") -> None:
        self.internals.append(
            {"parent_hash": parent, "trace_index": index, "from": sender, "to": to, "value_wei": str(value_wei), "call_type": call_type}
        )

    def transfer(self, tx_hash: str, token: str, sender: str, to: str, amount: int) -> int:
        if sender != ZERO:
            have = self.balances[(token, sender)]
            if have < amount:
                raise AssertionError(f"generator bug: {sender} overdraws {token}")
            self.balances[(token, sender)] = have - amount
        if to != ZERO:
            self.balances[(token, to)] += amount
        logs = self.transfers[tx_hash]
        logs.append({"tx_hash": tx_hash, "log_index": len(logs), "token": token, "from": sender, "to": to, "amount_raw": str(amount)})
        return len(logs) - 1

    def create_contract(
        self, label: str, creator: str, block: int, bytecode: bytes, factory: Optional[str] = None
    ) -> tuple[str, str]:
        address = self.addr(label)
        if factory is None:
            h = self.tx(f"create/{label}", block, creator, None, 0, "0x" + bytecode.hex())
            direct_creator = creator
        else:
            h = self.tx(f"create/{label}", block, creator, factory, 0, "0x60fe47b1")
            self.internal(h, 0, factory, address, 0, "create")
            direct_creator = factory
        self.contracts.append(
            {"address": address, "creator": direct_creator, "creation_tx": h, "bytecode": "0x" + bytecode.hex(), "created_block": block}
        )
        return address, h

    def create_token(
        self, label: str, creator: str, block: int, name: str, symbol: str, decimals: int, supply: int,
        holder: str, factory: Optional[str] = None,
    ) -> str:
        address, h = self.create_contract(label, creator, block, selector_stub(label.encode()), factory)
        self.transfer(h, address, ZERO, holder, supply)
        self.metadata.append(
            {"address": address, "name": name, "symbol": symbol, "decimals": decimals, "total_supply_raw": str(supply)}
        )
        return address

    def files(self) -> dict[str, str]:
        def jsonl(rows: list[dict]) -> str:
            return "".join(json.dumps(r, sort_keys=True, ensure_ascii=False) + "\n" for r in rows)

        txs = sorted(self.txs, key=lambda t: (t[0], t[1]))
        blocks = [{"number": b, "timestamp": block_time(b)} for b in sorted(self.blocks)]
        transfers = [ev for _, _, tx in txs for ev in self.transfers.get(tx["hash"], [])]
        order = {tx["hash"]: i for i, (_, _, tx) in enumerate(txs)}
        internals = sorted(self.internals, key=lambda r: (order[r["parent_hash"]], r["trace_index"]))
        return {
            FILE_NAMES["blocks"]: jsonl(blocks),
            FILE_NAMES["transactions"]: jsonl([t for _, _, t in txs]),
            FILE_NAMES["internal_transactions"]: jsonl(internals),
            FILE_NAMES["contracts"]: jsonl(self.contracts),
            FILE_NAMES["token_transfers"]: jsonl(transfers),
            FILE_NAMES["token_metadata"]: jsonl(self.metadata),
        }


def block_time(block: int) -> int:
    return GENESIS_TS + (block - BASE_BLOCK) * BLOCK_SECONDS


def day_block(day: float) -> int:
    return BASE_BLOCK + int(day * BLOCKS_PER_DAY)


def _eth(amount: str | Decimal) -> int:
    return int(Decimal(amount) * WEI_PER_ETH)


def _to_fullwidth(s: str) -> str:
    return "".join(chr(ord(c) + 0xFEE0) if "!" <= c <= "~" else c for c in s)


def _naive_hits(text: str, ids: list[str]) -> bool:
    t = normalize(text)
    return any(i and i in t for i in ids)


def _random_word(rng: random.Random, lo: int, hi: int) -> str:
    return "".join(rng.choice("BCDFGJKLMNPQRSVWXZ") for _ in range(rng.randint(lo, hi)))


@dataclass
class GroundTruth:
    targets: list[dict] = field(default_factory=list)
    counterfeits: list[dict] = field(default_factory=list)
    airdrop: list[dict] = field(default_factory=list)
    arbitrage: list[dict] = field(default_factory=list)
    undetectable: list[dict] = field(default_factory=list)
    laundering: dict[str, list[str]] = field(default_factory=dict)
    exchanges: list[str] = field(default_factory=list)
    expected: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "GroundTruth":
        return cls(**data)

    def planted_tokens(self, verdict: Optional[str] = None) -> set[str]:
        return {c["token"] for c in self.counterfeits if verdict is None or c["expected_verdict"] == verdict}


@dataclass
class SyntheticLedger:
    files: dict[str, str]
    truth: GroundTruth
    targets: list[dict]
    labels: dict[str, list[str]]

    def all_files(self) -> dict[str, str]:
        out = dict(self.files)
        out[LABELS_FILE] = json.dumps(self.labels, indent=2, sort_keys=True) + "\n"
        out["targets.json"] = json.dumps(self.targets, indent=2) + "\n"
        out["ground_truth.json"] = json.dumps(self.truth.to_json(), indent=2, sort_keys=True) + "\n"
        return out

    def write(self, out_dir: str | Path) -> dict[str, Path]:
        d = Path(out_dir)
        d.mkdir(parents=True, exist_ok=True)
        written = {}
        for name, text in self.all_files().items():
            p = d / name
            p.write_text(text, encoding="utf-8")
            written[name] = p
        return written


def _decorate(rng: random.Random, base: str, status: str, decor: tuple[str, ...], avoid: list[str]) -> str:
    if status == "identical":
        v = rng.choice(IDENTICAL_VARIANTS)
        if v == "lower":
            return base.lower()
        if v == "upper":
            return base.upper()
        if v == "fullwidth":
            return _to_fullwidth(base)
        return v.format(base)
    if status == "combo":
        start = rng.randrange(len(decor))
        for k in range(len(decor)):
            text = decor[(start + k) % len(decor)].format(base)
            if not _naive_hits(text, avoid):
                return text
        raise ScenarioError(f"no safe combo decoration for {base!r}")
    for _ in range(100):
        text = _random_word(rng, 3, 6)
        if not _naive_hits(text, avoid + [normalize(base)]):
            return text
    raise ScenarioError("could not draw an unrelated identifier")


def generate(cfg: ScenarioConfig) -> SyntheticLedger:
    """Build ledger files and ground truth for a scenario; raises ScenarioError on bad config."""
    _check(cfg)
    targets_sel = _select_targets(cfg.targets)
    if (cfg.airdrop or cfg.arbitrage or cfg.counterfeits and any(cfg.counterfeits.values())) and not targets_sel:
        raise ScenarioError("campaigns and counterfeits need at least one target")

    ch = _Chain(cfg.seed)
    truth = GroundTruth()
    labels: dict[str, set[str]] = {"exchanges": set(), "trusted_creators": set(), "official_tokens": set(), "migrated_tokens": set()}
    all_ids = [i for _, n, s in targets_sel for i in (normalize(n), normalize(s)) if i]
    block = BASE_BLOCK

    # official targets
    official: dict[str, dict] = {}
    for rank, name, symbol in targets_sel:
        team = ch.addr(f"official/{symbol}/team")
        supply = 10**9 * 10**18
        tok = ch.create_token(f"official/{symbol}", team, block, name, symbol, 18, supply, team)
        official[symbol] = {"address": tok, "name": name, "symbol": symbol, "cap_rank": rank, "team": team}
        labels["official_tokens"].add(tok)
        block += 1
    target_rows = [{k: v for k, v in o.items() if k != "team"} for o in official.values()]
    target_rows.sort(key=lambda t: (t["cap_rank"], t["address"]))
    truth.targets = target_rows

    def target_for(symbol: Optional[str], i: int) -> dict:
        if symbol is not None:
            for o in official.values():
                if o["symbol"].upper() == symbol.upper():
                    return o
            raise ScenarioError(f"campaign target {symbol!r} is not among the scenario targets")
        return target_rows_by_rank[i % len(target_rows_by_rank)]

    target_rows_by_rank = [official[t["symbol"]] for t in target_rows]

    def plant(label: str, tgt: dict, cls_key: str, creator: str, blk: int, decimals: int, supply: int,
              holder: str, factory: Optional[str] = None, rng: Optional[random.Random] = None,
              verdict: Optional[str] = None, scam: Optional[str] = None) -> str:
        rng = rng or ch.rng(f"names/{label}")
        n_status, s_status = cls_key.split("/")
        avoid = [i for i in all_ids if i not in (normalize(tgt["name"]), normalize(tgt["symbol"]))]
        name = _decorate(rng, tgt["name"], n_status, NAME_DECOR, avoid)
        symbol = _decorate(rng, tgt["symbol"], s_status, SYMBOL_DECOR, avoid)
        tok = ch.create_token(label, creator, blk, name, symbol, decimals, supply, holder, factory)
        if verdict is None:
            short_symbol_combo = s_status == "combo" and n_status == "unrelated" and len(normalize(tgt["symbol"])) < 4
            verdict = "needs_review" if short_symbol_combo else "confirmed"
        truth.counterfeits.append({
            "token": tok, "target": tgt["address"], "name": name, "symbol": symbol,
            "name_status": n_status, "symbol_status": s_status, "expected_verdict": verdict,
            "creator": factory or creator, "origin": creator, "via_factory": factory is not None, "scam": scam,
        })
        return tok

    # plain counterfeits, optionally through factories
    creators = [ch.addr(f"creator/{i}") for i in range(max(cfg.creators, 1))]
    factories: list[str] = []
    if cfg.factory_fraction > 0:
        fac_owner = ch.addr("factory/owner")
        fac, _ = ch.create_contract("factory/0", fac_owner, block, b"\x60\x80\x60\x40\x52\x60\xfe\x47\xb1\x00")
        factories.append(fac)
        block += 1
    holders = [ch.addr(f"holder/{i}") for i in range(16)]
    plain_tokens: list[tuple[str, str]] = []
    crng = ch.rng("counterfeits/assign")
    k = 0
    for tgt in target_rows_by_rank:
        for cls_key in MATCH_CLASSES:
            for j in range(cfg.counterfeits.get(cls_key, 0)):
                label = f"cf/{tgt['symbol']}/{cls_key}/{j}"
                creator = creators[crng.randrange(len(creators))]
                factory = factories[0] if factories and crng.random() < cfg.factory_fraction else None
                supply = crng.choice((10**6, 10**9, 10**12, 10**64)) * 10**18
                tok = plant(label, tgt, cls_key, creator, block, 18, supply, creator, factory)
                plain_tokens.append((tok, creator))
                k += 1
                if k % 8 == 0:
                    block += 1
    block += 1

    # allowlisted look-alikes, one per rule per plant
    for i in range(cfg.filter_plants):
        tgt = target_rows_by_rank[i % len(target_rows_by_rank)]
        team = ch.addr(f"official/{tgt['symbol']}/team")
        mig = plant(f"rule1/{i}", tgt, "identical/identical", team, block, 18, 10**27, team,
                    rng=ch.rng(f"names/rule1/{i}"), verdict="filtered_rule1")
        labels["migrated_tokens"].add(mig)
        tester = ch.addr(f"trusted/{i}")
        labels["trusted_creators"].add(tester)
        plant(f"rule2/{i}", tgt, "identical/identical", tester, block, 18, 10**27, tester, verdict="filtered_rule2")
        other_team = ch.addr(f"rule3/{i}/team")
        off = plant(f"rule3/{i}", tgt, "unrelated/identical", other_team, block, 18, 10**27, other_team,
                    verdict="filtered_rule3")
        labels["official_tokens"].add(off)
        block += 1

    # benign tokens with unrelated identifiers
    nrng = ch.rng("noise/tokens")
    noise_tokens = []
    for i in range(min(4, cfg.noise_transactions)):
        owner = ch.addr(f"noise/token-owner/{i}")
        while True:
            name = _random_word(nrng, 4, 7).title() + " Token"
            symbol = _random_word(nrng, 3, 5)
            if not _naive_hits(name, all_ids) and not _naive_hits(symbol, all_ids):
                break
        tok = ch.create_token(f"noise/token/{i}", owner, block, name, symbol, 18, 10**30, owner)
        noise_tokens.append((tok, owner))
    block += 1
    creation_end = block

    scam_receivers: list[str] = []

    # airdrop campaigns
    airdrop_victims: list[list[str]] = []
    for ci, camp in enumerate(cfg.airdrop):
        rng = ch.rng(f"airdrop/{ci}")
        tgt = target_for(camp.target, ci)
        creator = ch.addr(f"airdrop/{ci}/creator")
        collector = ch.addr(f"airdrop/{ci}/collector")
        distributor = collector if camp.shared_scam_address else ch.addr(f"airdrop/{ci}/distributor")
        eth_wei = _eth(camp.eth_per_victim)
        rate = Fraction(camp.rate)
        payout = int(Fraction(eth_wei) * rate * 10**camp.decimals / WEI_PER_ETH)
        supply = payout * (camp.victims + 1) + 10**camp.decimals
        tok = plant(f"airdrop/{ci}/token", tgt, "identical/identical", creator, creation_end - 1,
                    camp.decimals, supply, distributor, scam="airdrop")
        scam_receivers.append(collector)
        victims, txs = [], []
        for vi in range(camp.victims):
            victim = ch.addr(f"airdrop/{ci}/victim/{vi}")
            blk = day_block(AIRDROP_DAY + ci % 10) + rng.randrange(BLOCKS_PER_DAY // 2)
            h = ch.tx(f"airdrop/{ci}/pay/{vi}", blk, victim, tok, eth_wei, "0x")
            ch.internal(h, 0, tok, collector, eth_wei)
            ch.transfer(h, tok, distributor, victim, payout)
            victims.append(victim)
            txs.append(h)
        airdrop_victims.append(victims)
        truth.airdrop.append({
            "token": tok, "target": tgt["address"], "rate": str(rate), "victims": sorted(set(victims)),
            "txs": txs, "eth_total_wei": str(eth_wei * camp.victims), "collector": collector,
            "distributor": distributor, "creator": creator,
        })

    # arbitrage campaigns
    for ci, camp in enumerate(cfg.arbitrage):
        rng = ch.rng(f"arbitrage/{ci}")
        tgt = target_for(camp.target, ci)
        creator = ch.addr(f"arbitrage/{ci}/creator")
        receivers = [ch.addr(f"arbitrage/{ci}/receiver/{r}") for r in range(camp.scam_receivers)]
        distributor = receivers[0] if camp.distributor_is_receiver else ch.addr(f"arbitrage/{ci}/distributor")
        scam_receivers.extend(receivers)
        unit = 10**camp.decimals
        tok = plant(f"arbitrage/{ci}/token", tgt, "identical/identical", creator, creation_end - 1,
                    camp.decimals, 10**15 * unit, distributor, scam="arbitrage")
        # official bait comes from the distributor's stock
        team = tgt["team"]
        bait_h = ch.tx(f"arbitrage/{ci}/bait-stock", creation_end, team, tgt["address"], 0, "0xa9059cbb")
        ch.transfer(bait_h, tgt["address"], team, distributor, 10**6 * 10**18)

        n = camp.victims
        n_nr = round(n * camp.no_return_fraction)
        n_t2 = min(round(n * camp.type2_fraction), n - n_nr)
        n_sec = min(round(n * camp.secondary_fraction), n - n_nr - n_t2)
        victims = [ch.addr(f"arbitrage/{ci}/victim/{vi}") for vi in range(n)]
        if ci == 0 and cfg.overlap_victims:
            victims[n_nr:n_nr + cfg.overlap_victims] = airdrop_victims[0][: cfg.overlap_victims]
        lo_c, hi_c = int(Decimal(camp.eth_min) * 100), int(Decimal(camp.eth_max) * 100)

        evidences, undetected, secondary, type2 = [], [], [], []
        for vi, victim in enumerate(victims):
            kind = "no_return" if vi < n_nr else "type2" if vi < n_nr + n_t2 else "secondary" if vi < n_nr + n_t2 + n_sec else "plain"
            recv = receivers[rng.randrange(len(receivers))]
            blk = day_block(ARBITRAGE_DAY) + rng.randrange(40 * BLOCKS_PER_DAY)
            amount = rng.randint(lo_c, hi_c) * 10**16
            pay = ch.tx(f"arbitrage/{ci}/pay/{vi}/0", blk, victim, recv, amount)
            if kind == "no_return":
                undetected.append({"victim": victim, "eth_tx": pay, "receiver": recv, "eth_amount_wei": str(amount)})
                continue
            if kind == "type2":
                blk += rng.randint(*RETURN_DELAY_BLOCKS)
                bh = ch.tx(f"arbitrage/{ci}/bait/{vi}", blk, distributor, tgt["address"], 0, "0xa9059cbb")
                ch.transfer(bh, tgt["address"], distributor, victim, rng.randint(10, 100) * 10**18)
                blk += rng.randint(*REPEAT_GAP_BLOCKS)
                amount = amount * rng.randint(2, 20)
                pay = ch.tx(f"arbitrage/{ci}/pay/{vi}/1", blk, victim, recv, amount)
                type2.append(victim)
            rounds = 1 + (rng.randint(1, 3) if kind == "secondary" else 0)
            for r in range(rounds):
                if r > 0:
                    blk += rng.randint(*REPEAT_GAP_BLOCKS)
                    amount = rng.randint(lo_c, hi_c) * 10**16
                    pay = ch.tx(f"arbitrage/{ci}/pay/{vi}/r{r}", blk, victim, recv, amount)
                delay = rng.randint(*RETURN_DELAY_BLOCKS)
                ret_blk = blk + delay
                rh = ch.tx(f"arbitrage/{ci}/return/{vi}/{r}", ret_blk, distributor, tok, 0, "0xa9059cbb")
                li = ch.transfer(rh, tok, distributor, victim, rng.randint(1, 10**6) * unit)
                evidences.append({
                    "victim": victim, "eth_tx": pay, "eth_amount_wei": str(amount), "scam_eth_receiver": recv,
                    "transfer_tx": rh, "log_index": li, "token_distributor": distributor,
                    "delta_seconds": delay * BLOCK_SECONDS,
                })
                blk = ret_blk
            if kind == "secondary":
                secondary.append(victim)
        truth.arbitrage.append({
            "token": tok, "target": tgt["address"], "receivers": receivers, "distributor": distributor,
            "creator": creator, "evidences": evidences, "secondary_victims": sorted(secondary),
            "type2_victims": sorted(type2), "eth_total_wei": str(sum(int(e["eth_amount_wei"]) for e in evidences)),
        })
        truth.undetectable.extend(undetected)

    # plain counterfeit circulation and benign noise, drawn from their own streams
    nrng = ch.rng("noise/traffic")
    eth_pool = [ch.addr(f"noise/eoa/{i}") for i in range(24)]
    circulating = [(tok, owner) for tok, owner in plain_tokens]
    for i in range(cfg.noise_transactions):
        blk = BASE_BLOCK + nrng.randrange(creation_end - BASE_BLOCK, TIMELINE_DAYS * BLOCKS_PER_DAY)
        roll = nrng.random()
        if roll < 0.6 or not (circulating or noise_tokens):
            a, b = nrng.sample(eth_pool, 2)
            ch.tx(f"noise/eth/{i}", blk, a, b, nrng.randint(1, 500) * 10**15)
        elif roll < 0.8 and noise_tokens:
            tok, owner = noise_tokens[nrng.randrange(len(noise_tokens))]
            dst = nrng.choice(eth_pool)
            h = ch.tx(f"noise/tok/{i}", blk, owner, tok, 0, "0xa9059cbb")
            ch.transfer(h, tok, owner, dst, nrng.randint(1, 1000) * 10**18)
        elif circulating:
            tok, owner = circulating[nrng.randrange(len(circulating))]
            dst = nrng.choice(holders)
            have = ch.balances[(tok, owner)]
            h = ch.tx(f"noise/cf/{i}", blk, owner, tok, 0, "0xa9059cbb")
            ch.transfer(h, tok, owner, dst, max(1, have // 1000))
        else:
            a, b = nrng.sample(eth_pool, 2)
            ch.tx(f"noise/eth/{i}", blk, a, b, nrng.randint(1, 500) * 10**15)

    # laundering: every scam receiver forwards through fund-transfer hops to an exchange
    exchanges = [ch.addr(f"exchange/{i}") for i in range(cfg.exchanges)]
    labels["exchanges"].update(exchanges)
    truth.exchanges = sorted(exchanges)
    if cfg.laundering_depth:
        lrng = ch.rng("laundering")
        for si, src in enumerate(sorted(set(scam_receivers))):
            path = [src] + [ch.addr(f"launder/{src}/{d}") for d in range(cfg.laundering_depth - 1)]
            sink = exchanges[lrng.randrange(len(exchanges))]
            blk = day_block(LAUNDERING_DAY) + si * 10
            amount = lrng.randint(100, 10_000) * 10**16
            for hop, (a, b) in enumerate(zip(path, path[1:] + [sink])):
                ch.tx(f"launder/{src}/{hop}", blk + hop, a, b, amount)
            truth.laundering[src] = path + [sink]

    # expected outcomes
    ad_total = sum(int(c["eth_total_wei"]) for c in truth.airdrop)
    ar_total = sum(int(c["eth_total_wei"]) for c in truth.arbitrage)
    ad_victims = {v for c in truth.airdrop for v in c["victims"]}
    ar_victims = {e["victim"] for c in truth.arbitrage for e in c["evidences"]}
    truth.expected = {
        "airdrop_tokens": sorted(c["token"] for c in truth.airdrop),
        "arbitrage_tokens": sorted(c["token"] for c in truth.arbitrage if c["evidences"]),
        "airdrop_eth_total_wei": str(ad_total),
        "arbitrage_eth_total_wei": str(ar_total),
        "airdrop_victims": len(ad_victims),
        "arbitrage_victims": len(ar_victims),
        "victims_in_both": len(ad_victims & ar_victims),
        "airdrop_transactions": sum(len(c["txs"]) for c in truth.airdrop),
        "arbitrage_transactions": sum(len(c["evidences"]) for c in truth.arbitrage),
        "secondary_victims": len({v for c in truth.arbitrage for v in c["secondary_victims"] + c["type2_victims"]}),
        "type2_victims": len({v for c in truth.arbitrage for v in c["type2_victims"]}),
    }
    truth.counterfeits.sort(key=lambda c: (c["target"], c["token"]))

    label_json = {k: sorted(v) for k, v in labels.items()}
    return SyntheticLedger(ch.files(), truth, target_rows, label_json)
