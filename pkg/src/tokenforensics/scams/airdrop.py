"""Airdrop scam detection.

In an airdrop scam the whole exchange happens inside one transaction: the
victim pays ETH into the counterfeit token contract, the contract forwards
all of it to a collector, and a distributor credits the victim with tokens
at a fixed rate.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..chain_store import Address, ExternalTx, IndexedLedger, TokenRecord, TxHash
from .config import WEI_PER_ETH, DetectorConfig


@dataclass(frozen=True)
class AirdropEvidence:
    tx_hash: TxHash
    victim: Address
    eth_in_wei: int
    tokens_out_raw: int
    rate_tokens_per_eth: Fraction
    eth_forward_to: Address
    token_distributor: Address

    def to_json(self) -> dict:
        return {
            "tx_hash": self.tx_hash,
            "victim": self.victim,
            "eth_in_wei": str(self.eth_in_wei),
            "tokens_out_raw": str(self.tokens_out_raw),
            "rate_tokens_per_eth": str(self.rate_tokens_per_eth),
            "eth_forward_to": self.eth_forward_to,
            "token_distributor": self.token_distributor,
        }


@dataclass(frozen=True)
class AirdropFinding:
    token: Address
    rate: Fraction
    evidences: tuple[AirdropEvidence, ...]

    @property
    def victims(self) -> frozenset[Address]:
        return frozenset(e.victim for e in self.evidences)

    @property
    def eth_total_wei(self) -> int:
        return sum(e.eth_in_wei for e in self.evidences)

    @property
    def eth_receivers(self) -> frozenset[Address]:
        return frozenset(e.eth_forward_to for e in self.evidences)

    @property
    def distributors(self) -> frozenset[Address]:
        return frozenset(e.token_distributor for e in self.evidences)

    def to_json(self) -> dict:
        return {
            "token": self.token,
            "rate": str(self.rate),
            "rate_decimal": f"{float(self.rate):.6f}",
            "victims": sorted(self.victims),
            "eth_total_wei": str(self.eth_total_wei),
            "evidences": [e.to_json() for e in self.evidences],
        }


def token_rate(amount_raw: int, decimals: int, value_wei: int) -> Fraction:
    """Whole tokens received per whole ETH paid, exactly."""
    return Fraction(amount_raw * WEI_PER_ETH, value_wei * 10**decimals)


def _evidence(ledger: IndexedLedger, token: TokenRecord, tx: ExternalTx) -> Optional[AirdropEvidence]:
    credited = [ev for ev in ledger.transfers_in_tx(tx.hash) if ev.token == token.address and ev.to == tx.sender]
    tokens_out = sum(ev.amount_raw for ev in credited)
    if tokens_out <= 0:
        return None

    forwards = [
        itx
        for itx in ledger.internal_txs_of(tx.hash)
        if itx.sender == token.address and itx.value_wei > 0
    ]
    # all received ETH must leave the contract in the same tx
    if sum(i.value_wei for i in forwards) != tx.value_wei:
        return None
    share: dict[Address, int] = {}
    first_seen: dict[Address, int] = {}
    for itx in forwards:
        share[itx.to] = share.get(itx.to, 0) + itx.value_wei
        first_seen.setdefault(itx.to, itx.trace_index)
    forward_to = min(share, key=lambda a: (-share[a], first_seen[a]))

    biggest = max(credited, key=lambda ev: (ev.amount_raw, -ev.log_index))
    return AirdropEvidence(
        tx_hash=tx.hash,
        victim=tx.sender,
        eth_in_wei=tx.value_wei,
        tokens_out_raw=tokens_out,
        rate_tokens_per_eth=token_rate(tokens_out, token.decimals, tx.value_wei),
        eth_forward_to=forward_to,
        token_distributor=biggest.sender,
    )


def airdrop_evidences(ledger: IndexedLedger, token: str, cfg: DetectorConfig) -> list[AirdropEvidence]:
    """Transactions satisfying all three airdrop conditions, in chain order."""
    rec = ledger.require_token(token)
    out = []
    for tx in ledger.eth_sends_to(rec.address, 0, 2**63):
        if tx.value_wei < cfg.min_eth_wei:
            continue
        ev = _evidence(ledger, rec, tx)
        if ev is not None:
            out.append(ev)
    out.sort(key=lambda e: (ledger.tx(e.tx_hash).block, ledger.tx(e.tx_hash).index))
    return out


def rates_agree(rates: list[Fraction], rel_tol: Fraction) -> tuple[bool, Fraction]:
    median = Fraction(statistics.median(rates))
    if median == 0:
        return False, median
    ok = all(abs(r - median) <= rel_tol * median for r in rates)
    return ok, median


def detect_airdrop(ledger: IndexedLedger, token: str, cfg: DetectorConfig | None = None) -> Optional[AirdropFinding]:
    """An :class:`AirdropFinding` when enough evidence shares one fixed rate, else None.

    Raises :class:`UnknownTokenError` for tokens without metadata.
    """
    cfg = cfg or DetectorConfig()
    rec = ledger.require_token(token)
    if not ledger.transfers_of(rec.address):
        return None
    evidences = airdrop_evidences(ledger, rec.address, cfg)
    if len(evidences) < cfg.min_airdrop_txs:
        return None
    ok, median = rates_agree([e.rate_tokens_per_eth for e in evidences], Fraction(cfg.rate_rel_tol))
    if not ok:
        return None
    return AirdropFinding(token=rec.address, rate=median, evidences=tuple(evidences))
