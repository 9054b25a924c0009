"""Loss and role aggregation across detected scams."""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Mapping, Optional

from ..chain_store import Address
from .airdrop import AirdropFinding
from .arbitrage import ArbitrageEvidence
from .config import WEI_PER_ETH
from .history import VictimHistoryStats

ROLES = ("token_contract", "token_creator", "eth_received", "token_distributor")
CENT = Decimal("0.01")


def wei_to_eth(wei: int) -> Decimal:
    return Decimal(wei) / Decimal(WEI_PER_ETH)


def eth_to_usd(eth: Decimal, usd_rate: Decimal) -> Decimal:
    return (eth * Decimal(usd_rate)).quantize(CENT, rounding=ROUND_HALF_UP)


@dataclass
class ScamTypeSummary:
    transactions: int = 0
    victims: frozenset[Address] = frozenset()
    eth_total_wei: int = 0
    usd_total: Decimal = Decimal("0.00")
    roles: dict[str, frozenset[Address]] = field(default_factory=lambda: {r: frozenset() for r in ROLES})

    @property
    def role_union(self) -> frozenset[Address]:
        out: frozenset[Address] = frozenset()
        for s in self.roles.values():
            out |= s
        return out

    def to_json(self) -> dict:
        union = self.role_union
        role_sum = sum(len(s) for s in self.roles.values())
        return {
            "transactions": self.transactions,
            "victims": len(self.victims),
            "eth_total_wei": str(self.eth_total_wei),
            "eth_total": str(wei_to_eth(self.eth_total_wei)),
            "usd_total": str(self.usd_total),
            "scam_addresses": {r: len(self.roles[r]) for r in ROLES} | {"sum": len(union)},
            "roles_per_address": round(role_sum / len(union), 4) if union else 0.0,
        }


@dataclass
class ScamSummary:
    airdrop: ScamTypeSummary
    arbitrage: ScamTypeSummary
    usd_rate: Decimal
    victims_in_both: int = 0
    secondary_victims: int = 0
    type2_victims: int = 0
    history: Optional[dict] = None

    @property
    def eth_total_wei(self) -> int:
        return self.airdrop.eth_total_wei + self.arbitrage.eth_total_wei

    @property
    def usd_total(self) -> Decimal:
        return eth_to_usd(wei_to_eth(self.eth_total_wei), self.usd_rate)

    def to_json(self) -> dict:
        all_addresses = self.airdrop.role_union | self.arbitrage.role_union
        tokens = self.airdrop.roles["token_contract"] | self.arbitrage.roles["token_contract"]
        return {
            "usd_rate": str(self.usd_rate),
            "airdrop": self.airdrop.to_json(),
            "arbitrage": self.arbitrage.to_json(),
            "total": {
                "transactions": self.airdrop.transactions + self.arbitrage.transactions,
                "scam_addresses": len(all_addresses),
                "counterfeit_tokens_involved": len(tokens),
                "victims": len(self.airdrop.victims | self.arbitrage.victims),
                "eth_total_wei": str(self.eth_total_wei),
                "eth_total": str(wei_to_eth(self.eth_total_wei)),
                "usd_total": str(self.usd_total),
            },
            "overlap": {
                "victims_in_both": self.victims_in_both,
                "secondary_victims": self.secondary_victims,
                "type2_victims": self.type2_victims,
            },
            "victim_history": self.history or {},
        }


def aggregate(
    airdrops: Iterable[AirdropFinding],
    arbitrage: Iterable[ArbitrageEvidence],
    history: Optional[VictimHistoryStats],
    usd_rate: Decimal | str | int,
    creators: Mapping[Address, Optional[Address]] | None = None,
) -> ScamSummary:
    """Fold findings into per-type totals and role sets.

    ``creators`` maps token contracts to their creator; tokens missing from it
    contribute no creator role.
    """
    usd_rate = Decimal(str(usd_rate))
    if usd_rate <= 0:
        raise ValueError("usd_rate must be positive")
    creators = creators or {}

    def creator_set(tokens: Iterable[Address]) -> frozenset[Address]:
        return frozenset(c for c in (creators.get(t) for t in tokens) if c is not None)

    airdrops = sorted(airdrops, key=lambda f: f.token)
    ad = ScamTypeSummary()
    ad.transactions = sum(len(f.evidences) for f in airdrops)
    ad.victims = frozenset(v for f in airdrops for v in f.victims)
    ad.eth_total_wei = sum(f.eth_total_wei for f in airdrops)
    ad.usd_total = eth_to_usd(wei_to_eth(ad.eth_total_wei), usd_rate)
    ad_tokens = frozenset(f.token for f in airdrops)
    ad.roles = {
        "token_contract": ad_tokens,
        "token_creator": creator_set(ad_tokens),
        "eth_received": frozenset(a for f in airdrops for a in f.eth_receivers),
        "token_distributor": frozenset(a for f in airdrops for a in f.distributors),
    }

    arbitrage = list(arbitrage)
    ar = ScamTypeSummary()
    ar.transactions = len({e.token_transfer for e in arbitrage})
    ar.victims = frozenset(e.victim for e in arbitrage)
    # one payment can precede several payouts; count it once
    payments = {e.eth_tx: e.eth_amount_wei for e in arbitrage}
    ar.eth_total_wei = sum(payments.values())
    ar.usd_total = eth_to_usd(wei_to_eth(ar.eth_total_wei), usd_rate)
    ar_tokens = frozenset(e.token for e in arbitrage)
    ar.roles = {
        "token_contract": ar_tokens,
        "token_creator": creator_set(ar_tokens),
        "eth_received": frozenset(e.scam_eth_receiver for e in arbitrage),
        "token_distributor": frozenset(e.token_distributor for e in arbitrage),
    }

    return ScamSummary(
        airdrop=ad,
        arbitrage=ar,
        usd_rate=usd_rate,
        victims_in_both=len(ad.victims & ar.victims),
        secondary_victims=len(history.secondary_victims) if history else 0,
        type2_victims=len(history.type2_victims) if history else 0,
        history=history.to_json() if history else None,
    )
