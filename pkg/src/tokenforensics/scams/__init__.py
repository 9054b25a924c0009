"""Airdrop and arbitrage scam detection over confirmed counterfeit tokens."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TypeVar

from ..chain_store import Address, IndexedLedger
from .airdrop import AirdropEvidence, AirdropFinding, detect_airdrop, token_rate
from .arbitrage import ArbitrageEvidence, detect_arbitrage
from .config import DetectorConfig, load_structured
from .history import VictimHistory, VictimHistoryStats, classify_victim_history
from .summary import ScamSummary, aggregate, eth_to_usd, wei_to_eth

T = TypeVar("T")
R = TypeVar("R")


def _ordered_map(fn: Callable[[T], R], items: Sequence[T], threads: int) -> list[R]:
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


@dataclass
class DetectionResult:
    airdrops: list[AirdropFinding]
    arbitrage: list[ArbitrageEvidence]
    history: VictimHistoryStats
    summary: ScamSummary


def detect_scams(
    ledger: IndexedLedger,
    tokens: Iterable[str],
    official_tokens: Iterable[str],
    cfg: DetectorConfig | None = None,
    threads: int = 1,
) -> DetectionResult:
    """Run airdrop detection, then arbitrage detection on the remaining tokens."""
    cfg = cfg or DetectorConfig()
    tokens = sorted({Address(t) for t in tokens})
    found = _ordered_map(lambda t: detect_airdrop(ledger, t, cfg), tokens, threads)
    airdrops = [f for f in found if f is not None]
    airdrop_tokens = {f.token for f in airdrops}
    rest = [t for t in tokens if t not in airdrop_tokens]
    arbitrage = [e for chunk in _ordered_map(lambda t: detect_arbitrage(ledger, t, cfg), rest, threads) for e in chunk]
    history = classify_victim_history(ledger, arbitrage, official_tokens)
    involved = airdrop_tokens | {e.token for e in arbitrage}
    summary = aggregate(airdrops, arbitrage, history, cfg.usd_rate, {t: ledger.creator_of(t) for t in involved})
    return DetectionResult(airdrops, arbitrage, history, summary)


__all__ = [
    "AirdropEvidence",
    "AirdropFinding",
    "ArbitrageEvidence",
    "DetectionResult",
    "DetectorConfig",
    "ScamSummary",
    "VictimHistory",
    "VictimHistoryStats",
    "aggregate",
    "classify_victim_history",
    "detect_airdrop",
    "detect_arbitrage",
    "detect_scams",
    "eth_to_usd",
    "load_structured",
    "token_rate",
    "wei_to_eth",
]
