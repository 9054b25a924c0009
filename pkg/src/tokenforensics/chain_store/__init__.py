"""Typed ledger records, ERC-20 detection and the indexed store."""

from .erc20 import MANDATORY_SELECTORS, detect_erc20, missing_selectors
from .ingest import (
    FILE_NAMES,
    LABELS_FILE,
    IngestError,
    ingest,
    ingest_dir,
    ledger_from_records,
    load_labels,
)
from .ledger import IndexedLedger, UnknownTokenError
from .types import (
    ZERO_ADDRESS,
    Address,
    Block,
    CallType,
    ContractRecord,
    ExternalTx,
    InternalTx,
    LabelSet,
    Rejection,
    TokenRecord,
    TransferEvent,
    TxHash,
)


def transfers_of(ledger: IndexedLedger, token: str) -> tuple[TransferEvent, ...]:
    return ledger.transfers_of(token)


def eth_sends_to(ledger: IndexedLedger, recipient: str, t_start: int, t_end: int) -> tuple[ExternalTx, ...]:
    return ledger.eth_sends_to(recipient, t_start, t_end)


__all__ = [
    "Address",
    "Block",
    "CallType",
    "ContractRecord",
    "ExternalTx",
    "FILE_NAMES",
    "IndexedLedger",
    "IngestError",
    "InternalTx",
    "LABELS_FILE",
    "LabelSet",
    "MANDATORY_SELECTORS",
    "Rejection",
    "TokenRecord",
    "TransferEvent",
    "TxHash",
    "UnknownTokenError",
    "ZERO_ADDRESS",
    "detect_erc20",
    "eth_sends_to",
    "ingest",
    "ingest_dir",
    "ledger_from_records",
    "load_labels",
    "missing_selectors",
    "transfers_of",
]
