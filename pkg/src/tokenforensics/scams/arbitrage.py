"""Arbitrage scam detection.

Each counterfeit transfer is treated as a possible payout to a victim. The
receiver's latest qualifying ETH payment shortly before it identifies the
scam address that took the money.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..chain_store import Address, ExternalTx, IndexedLedger, TransferEvent, TxHash
from .config import DetectorConfig


@dataclass(frozen=True)
class ArbitrageEvidence:
    victim: Address
    eth_tx: TxHash
    eth_amount_wei: int
    scam_eth_receiver: Address
    token_transfer: tuple[TxHash, int]
    token: Address
    token_distributor: Address
    delta_seconds: int

    def to_json(self) -> dict:
        return {
            "victim": self.victim,
            "eth_tx": self.eth_tx,
            "eth_amount_wei": str(self.eth_amount_wei),
            "scam_eth_receiver": self.scam_eth_receiver,
            "token_transfer": {"tx_hash": self.token_transfer[0], "log_index": self.token_transfer[1]},
            "token": self.token,
            "token_distributor": self.token_distributor,
            "delta_seconds": self.delta_seconds,
        }


def latest_payment(
    ledger: IndexedLedger, payer: Address, at: int, cfg: DetectorConfig, exclude_tx: Optional[TxHash] = None
) -> Optional[ExternalTx]:
    """Most recent ETH send by ``payer`` in ``[at - window, at)`` worth at least ``min_eth_wei``."""
    sends = ledger.eth_sends_from(payer, max(0, at - cfg.window_seconds), at - 1) if at > 0 else ()
    for tx in reversed(sends):
        if tx.value_wei >= cfg.min_eth_wei and tx.hash != exclude_tx:
            return tx
    return None


def _match(ledger: IndexedLedger, ev: TransferEvent, cfg: DetectorConfig) -> Optional[ArbitrageEvidence]:
    t = ledger.tx_timestamp(ev.tx_hash)
    pay = latest_payment(ledger, ev.to, t, cfg, exclude_tx=ev.tx_hash)
    if pay is None:
        return None
    return ArbitrageEvidence(
        victim=ev.to,
        eth_tx=pay.hash,
        eth_amount_wei=pay.value_wei,
        scam_eth_receiver=pay.to,
        token_transfer=(ev.tx_hash, ev.log_index),
        token=ev.token,
        token_distributor=ev.sender,
        delta_seconds=t - ledger.block_timestamp(pay.block),
    )


def detect_arbitrage(ledger: IndexedLedger, token: str, cfg: DetectorConfig | None = None) -> list[ArbitrageEvidence]:
    """Evidence for every transfer of ``token`` preceded by a payment from its receiver.

    The caller is responsible for skipping tokens already explained as
    airdrop scams.
    """
    cfg = cfg or DetectorConfig()
    rec = ledger.require_token(token)
    out = []
    for ev in ledger.transfers_of(rec.address):
        found = _match(ledger, ev, cfg)
        if found is not None:
            out.append(found)
    return out
