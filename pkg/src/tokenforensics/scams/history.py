"""Per-victim payment history for arbitrage scams: repeat payments and official-token baiting."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..chain_store import Address, IndexedLedger
from .arbitrage import ArbitrageEvidence


@dataclass(frozen=True)
class VictimHistory:
    victim: Address
    scam_sends: int
    scam_sent_wei: int
    # set when the victim received an official token from a scam-side address
    type2: bool = False
    first_bait_time: Optional[int] = None
    sent_again: bool = False
    repeat_greater: bool = False

    @property
    def secondary(self) -> bool:
        return self.scam_sends > 1

    def to_json(self) -> dict:
        return {
            "victim": self.victim,
            "scam_sends": self.scam_sends,
            "scam_sent_wei": str(self.scam_sent_wei),
            "secondary": self.secondary,
            "type2": self.type2,
            "sent_again": self.sent_again,
            "repeat_greater": self.repeat_greater,
        }


@dataclass
class VictimHistoryStats:
    per_victim: dict[Address, VictimHistory] = field(default_factory=dict)

    @property
    def secondary_victims(self) -> list[Address]:
        return sorted(v for v, h in self.per_victim.items() if h.secondary)

    @property
    def type2_victims(self) -> list[Address]:
        return sorted(v for v, h in self.per_victim.items() if h.type2)

    @property
    def type2_sent_again_fraction(self) -> float:
        t2 = [h for h in self.per_victim.values() if h.type2]
        return sum(h.sent_again for h in t2) / len(t2) if t2 else 0.0

    @property
    def type2_repeat_greater_fraction(self) -> float:
        again = [h for h in self.per_victim.values() if h.type2 and h.sent_again]
        return sum(h.repeat_greater for h in again) / len(again) if again else 0.0

    def to_json(self) -> dict:
        n = len(self.per_victim)
        return {
            "victims": n,
            "secondary_victims": len(self.secondary_victims),
            "secondary_fraction": round(len(self.secondary_victims) / n, 6) if n else 0.0,
            "type2_victims": len(self.type2_victims),
            "type2_sent_again_fraction": round(self.type2_sent_again_fraction, 6),
            "type2_repeat_greater_fraction": round(self.type2_repeat_greater_fraction, 6),
        }


def classify_victim_history(
    ledger: IndexedLedger,
    evidences: Iterable[ArbitrageEvidence],
    official_tokens: Iterable[str],
) -> VictimHistoryStats:
    evidences = list(evidences)
    official = {Address(a) for a in official_tokens}
    receivers = {e.scam_eth_receiver for e in evidences}
    scam_side = receivers | {e.token_distributor for e in evidences}

    stats = VictimHistoryStats()
    for victim in sorted({e.victim for e in evidences}):
        sends = [tx for tx in ledger.all_eth_sends_from(victim) if tx.to in receivers]
        times = [ledger.block_timestamp(tx.block) for tx in sends]
        bait_times = [
            ledger.tx_timestamp(ev.tx_hash)
            for ev in ledger.transfers_to(victim)
            if ev.token in official and ev.sender in scam_side
        ]
        type2 = bool(bait_times)
        first_bait = min(bait_times) if bait_times else None
        sent_again = repeat_greater = False
        if type2 and sends:
            later = [tx for tx, t in zip(sends, times) if t > first_bait]
            sent_again = bool(later)
            if later:
                repeat_greater = later[0].value_wei > sends[0].value_wei
        stats.per_victim[victim] = VictimHistory(
            victim=victim,
            scam_sends=len(sends),
            scam_sent_wei=sum(tx.value_wei for tx in sends),
            type2=type2,
            first_bait_time=first_bait,
            sent_again=sent_again,
            repeat_greater=repeat_greater,
        )
    return stats
