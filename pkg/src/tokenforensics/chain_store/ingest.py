"""Load exported JSON Lines files into an :class:`IndexedLedger`.

Bad lines never abort a load: each one becomes a :class:`Rejection` carrying
its file name and 1-based line number. Only an unreadable file is fatal.
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, Optional

from .erc20 import detect_erc20
from .ledger import IndexedLedger
from .types import (
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
    parse_hex_bytes,
)

log = logging.getLogger(__name__)

FILE_NAMES = {
    "blocks": "blocks.jsonl",
    "transactions": "transactions.jsonl",
    "internal_transactions": "internal_transactions.jsonl",
    "contracts": "contracts.jsonl",
    "token_transfers": "token_transfers.jsonl",
    "token_metadata": "token_metadata.jsonl",
}
LABELS_FILE = "labels.json"
_KIND_BY_NAME = {v: k for k, v in FILE_NAMES.items()}

MAX_DECIMALS = 77


class IngestError(Exception):
    """Fatal ingestion failure (unreadable or unrecognized input file)."""


def _int(obj: Mapping[str, Any], key: str) -> int:
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise TypeError(f"{key}: expected integer, got {v!r}")
    if v < 0:
        raise ValueError(f"{key}: negative value {v}")
    return v


def _amount(obj: Mapping[str, Any], key: str) -> int:
    v = obj[key]
    if isinstance(v, str):
        text = v.strip()
        if not text.isdigit():
            raise ValueError(f"{key}: not a non-negative decimal string: {v!r}")
        return int(text)
    return _int(obj, key)


def _text(obj: Mapping[str, Any], key: str) -> str:
    v = obj.get(key) or ""
    if not isinstance(v, str):
        raise TypeError(f"{key}: expected string")
    return v


def _parse_block(o: Mapping[str, Any]) -> Block:
    return Block(number=_int(o, "number"), timestamp=_int(o, "timestamp"))


def _parse_tx(o: Mapping[str, Any]) -> ExternalTx:
    to = o.get("to")
    status = o.get("status", True)
    if not isinstance(status, bool):
        raise TypeError("status: expected bool")
    return ExternalTx(
        hash=TxHash(o["hash"]),
        block=_int(o, "block"),
        sender=Address(o["from"]),
        to=Address(to) if to else None,
        value_wei=_amount(o, "value_wei"),
        input_data=parse_hex_bytes(o.get("input") or ""),
        status=status,
    )


def _parse_internal(o: Mapping[str, Any]) -> InternalTx:
    return InternalTx(
        parent_hash=TxHash(o["parent_hash"]),
        trace_index=_int(o, "trace_index"),
        sender=Address(o["from"]),
        to=Address(o["to"]),
        value_wei=_amount(o, "value_wei"),
        call_type=CallType(str(o.get("call_type", "call")).lower()),
    )


def _parse_contract(o: Mapping[str, Any]) -> ContractRecord:
    return ContractRecord(
        address=Address(o["address"]),
        creator=Address(o["creator"]),
        creation_tx=TxHash(o["creation_tx"]),
        bytecode=parse_hex_bytes(o.get("bytecode") or ""),
        created_block=_int(o, "created_block"),
    )


def _parse_transfer(o: Mapping[str, Any]) -> TransferEvent:
    return TransferEvent(
        tx_hash=TxHash(o["tx_hash"]),
        log_index=_int(o, "log_index"),
        token=Address(o["token"]),
        sender=Address(o["from"]),
        to=Address(o["to"]),
        amount_raw=_amount(o, "amount_raw"),
    )


def _parse_metadata(o: Mapping[str, Any]) -> TokenRecord:
    decimals = _int(o, "decimals")
    if decimals > MAX_DECIMALS:
        raise ValueError(f"decimals out of range: {decimals}")
    return TokenRecord(
        address=Address(o["address"]),
        name=_text(o, "name"),
        symbol=_text(o, "symbol"),
        decimals=decimals,
        total_supply_raw=_amount(o, "total_supply_raw"),
    )


_PARSERS: dict[str, Callable[[Mapping[str, Any]], Any]] = {
    "blocks": _parse_block,
    "transactions": _parse_tx,
    "internal_transactions": _parse_internal,
    "contracts": _parse_contract,
    "token_transfers": _parse_transfer,
    "token_metadata": _parse_metadata,
}


def _parse_objects(kind: str, rows: Iterable[tuple[int, Any]]) -> tuple[list[tuple[int, Any]], list[Rejection]]:
    parser = _PARSERS[kind]
    fname = FILE_NAMES[kind]
    good: list[tuple[int, Any]] = []
    bad: list[Rejection] = []
    for lineno, obj in rows:
        if not isinstance(obj, Mapping):
            bad.append(Rejection(fname, lineno, "malformed", "not a JSON object"))
            continue
        try:
            good.append((lineno, parser(obj)))
        except (KeyError, TypeError, ValueError) as exc:
            bad.append(Rejection(fname, lineno, "malformed", f"{type(exc).__name__}: {exc}"))
    return good, bad


def _read_jsonl(path: Path) -> Iterable[tuple[int, Any]]:
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    rows: list[tuple[int, Any]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append((lineno, json.loads(line)))
        except json.JSONDecodeError as exc:
            rows.append((lineno, _BadLine(str(exc))))
    return rows


class _BadLine:
    __slots__ = ("msg",)

    def __init__(self, msg: str):
        self.msg = msg


def _parse_file(kind: str, rows: Iterable[tuple[int, Any]]) -> tuple[list[tuple[int, Any]], list[Rejection]]:
    decoded: list[tuple[int, Any]] = []
    rejected: list[Rejection] = []
    for lineno, obj in rows:
        if isinstance(obj, _BadLine):
            rejected.append(Rejection(FILE_NAMES[kind], lineno, "malformed", f"invalid JSON: {obj.msg}"))
        else:
            decoded.append((lineno, obj))
    good, bad = _parse_objects(kind, decoded)
    return good, rejected + bad


def load_labels(path: str | os.PathLike) -> LabelSet:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise IngestError(f"cannot read labels {path}: {exc}") from exc
    return LabelSet.from_json(data)


def _link(parsed: Mapping[str, tuple[list[tuple[int, Any]], list[Rejection]]], labels: LabelSet) -> IndexedLedger:
    rejections: list[Rejection] = []
    for kind in FILE_NAMES:
        rejections.extend(parsed.get(kind, ([], []))[1])

    def good(kind: str) -> list[tuple[int, Any]]:
        return parsed.get(kind, ([], []))[0]

    def reject(kind: str, lineno: int, reason: str, detail: str = "") -> None:
        rejections.append(Rejection(FILE_NAMES[kind], lineno, reason, detail))

    blocks: dict[int, tuple[int, Block]] = {}
    for lineno, b in good("blocks"):
        if b.number in blocks:
            reject("blocks", lineno, "duplicate", f"block {b.number}")
        else:
            blocks[b.number] = (lineno, b)
    accepted_blocks: list[Block] = []
    last_ts = None
    for number in sorted(blocks):
        lineno, b = blocks[number]
        if last_ts is not None and b.timestamp < last_ts:
            reject("blocks", lineno, "timestamp_regression", f"block {number} at {b.timestamp} < {last_ts}")
            continue
        accepted_blocks.append(b)
        last_ts = b.timestamp
    block_set = {b.number for b in accepted_blocks}

    txs: dict[TxHash, ExternalTx] = {}
    next_index: dict[int, int] = {}
    for lineno, tx in good("transactions"):
        if tx.hash in txs:
            reject("transactions", lineno, "duplicate", tx.hash)
        elif tx.block not in block_set:
            reject("transactions", lineno, "unknown_block", f"block {tx.block}")
        else:
            idx = next_index.get(tx.block, 0)
            next_index[tx.block] = idx + 1
            txs[tx.hash] = _with_index(tx, idx)

    internals: dict[tuple[TxHash, int], InternalTx] = {}
    for lineno, itx in good("internal_transactions"):
        key = (itx.parent_hash, itx.trace_index)
        if itx.parent_hash not in txs:
            reject("internal_transactions", lineno, "unknown_parent", itx.parent_hash)
        elif key in internals:
            reject("internal_transactions", lineno, "duplicate", f"{itx.parent_hash}#{itx.trace_index}")
        else:
            internals[key] = itx

    raw_contracts: dict[Address, ContractRecord] = {}
    for lineno, c in good("contracts"):
        if c.address in raw_contracts:
            reject("contracts", lineno, "duplicate", c.address)
        else:
            raw_contracts[c.address] = c
    contracts = {
        a: _with_via_internal(c, c.creator in raw_contracts) for a, c in raw_contracts.items()
    }

    tokens: dict[Address, TokenRecord] = {}
    for lineno, t in good("token_metadata"):
        c = contracts.get(t.address)
        if t.address in tokens:
            reject("token_metadata", lineno, "duplicate", t.address)
        elif c is None:
            reject("token_metadata", lineno, "unknown_contract", t.address)
        elif not detect_erc20(c.bytecode):
            reject("token_metadata", lineno, "not_erc20", t.address)
        else:
            tokens[t.address] = t

    transfers: dict[tuple[TxHash, int], TransferEvent] = {}
    for lineno, ev in good("token_transfers"):
        key = (ev.tx_hash, ev.log_index)
        if ev.tx_hash not in txs:
            reject("token_transfers", lineno, "unknown_tx", ev.tx_hash)
        elif ev.token not in tokens:
            reject("token_transfers", lineno, "unknown_token", ev.token)
        elif key in transfers:
            reject("token_transfers", lineno, "duplicate", f"{ev.tx_hash}#{ev.log_index}")
        else:
            transfers[key] = ev

    order = {k: i for i, k in enumerate(FILE_NAMES.values())}
    rejections.sort(key=lambda r: (order.get(r.file, len(order)), r.line))
    if rejections:
        log.warning("ingest: %d input lines rejected", len(rejections))
    return IndexedLedger(
        blocks=accepted_blocks,
        transactions=txs.values(),
        internal_txs=internals.values(),
        contracts=contracts.values(),
        tokens=tokens.values(),
        transfers=transfers.values(),
        labels=labels,
        rejections=rejections,
    )


def _with_index(tx: ExternalTx, index: int) -> ExternalTx:
    return ExternalTx(tx.hash, tx.block, tx.sender, tx.to, tx.value_wei, tx.input_data, tx.status, index)


def _with_via_internal(c: ContractRecord, flag: bool) -> ContractRecord:
    return ContractRecord(c.address, c.creator, c.creation_tx, c.bytecode, c.created_block, flag)


def ingest(
    paths: Iterable[str | os.PathLike],
    labels: Optional[LabelSet] = None,
    threads: int = 1,
) -> IndexedLedger:
    """Parse the given ledger files and build an index.

    Files are recognized by their canonical names (``blocks.jsonl`` and so
    on); a ``labels.json`` among ``paths`` is used when ``labels`` is None.
    Missing kinds are treated as empty.
    """
    by_kind: dict[str, Path] = {}
    labels_path: Optional[Path] = None
    for p in map(Path, paths):
        if p.name == LABELS_FILE:
            labels_path = p
            continue
        kind = _KIND_BY_NAME.get(p.name)
        if kind is None:
            raise IngestError(f"unrecognized input file: {p}")
        if not p.is_file():
            raise IngestError(f"cannot read {p}: no such file")
        by_kind[kind] = p
    if labels is None:
        labels = load_labels(labels_path) if labels_path else LabelSet()

    def work(kind: str):
        return kind, _parse_file(kind, _read_jsonl(by_kind[kind]))

    kinds = sorted(by_kind)
    if threads > 1 and len(kinds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parsed = dict(pool.map(work, kinds))
    else:
        parsed = dict(map(work, kinds))
    return _link(parsed, labels)


def ingest_dir(directory: str | os.PathLike, labels: Optional[LabelSet] = None, threads: int = 1) -> IndexedLedger:
    """Ingest every recognized file present in ``directory``."""
    d = Path(directory)
    if not d.is_dir():
        raise IngestError(f"not a directory: {d}")
    names = list(FILE_NAMES.values()) + [LABELS_FILE]
    return ingest([d / n for n in names if (d / n).is_file()], labels=labels, threads=threads)


def ledger_from_records(records: Mapping[str, Iterable[Mapping[str, Any]]], labels: Optional[LabelSet] = None) -> IndexedLedger:
    """Build a ledger from in-memory JSON objects keyed by file kind (``"blocks"``, ...)."""
    unknown = set(records) - set(FILE_NAMES)
    if unknown:
        raise IngestError(f"unknown record kinds: {sorted(unknown)}")
    parsed = {kind: _parse_file(kind, list(enumerate(rows, start=1))) for kind, rows in records.items()}
    return _link(parsed, labels or LabelSet())
