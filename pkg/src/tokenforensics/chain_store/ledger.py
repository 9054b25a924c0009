"""Read-only index over validated ledger records."""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections import defaultdict
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Optional, Sequence

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
)


class UnknownTokenError(KeyError):
    pass


class _TimeIndex:
    """Transactions of one address sorted by time, searchable by timestamp."""

    __slots__ = ("times", "txs")

    def __init__(self, pairs: list[tuple[int, ExternalTx]]):
        pairs.sort(key=lambda p: (p[0], p[1].block, p[1].index))
        self.times = [t for t, _ in pairs]
        self.txs = tuple(tx for _, tx in pairs)

    def window(self, t_start: int, t_end: int) -> tuple[ExternalTx, ...]:
        lo = bisect_left(self.times, t_start)
        hi = bisect_right(self.times, t_end)
        return self.txs[lo:hi]


_EMPTY_TIME_INDEX = _TimeIndex([])


class IndexedLedger:
    """Immutable, thread-safe query surface built by :func:`ingest`.

    All containers are created once in ``__init__`` and only read afterwards.
    """

    def __init__(
        self,
        *,
        blocks: Iterable[Block],
        transactions: Iterable[ExternalTx],
        internal_txs: Iterable[InternalTx],
        contracts: Iterable[ContractRecord],
        tokens: Iterable[TokenRecord],
        transfers: Iterable[TransferEvent],
        labels: LabelSet | None = None,
        rejections: Iterable[Rejection] = (),
    ):
        self.labels = labels or LabelSet()
        self.rejections: tuple[Rejection, ...] = tuple(rejections)

        self._blocks = MappingProxyType({b.number: b.timestamp for b in blocks})
        self._block_numbers = sorted(self._blocks)

        txs = sorted(transactions, key=lambda tx: (tx.block, tx.index))
        self._txs: tuple[ExternalTx, ...] = tuple(txs)
        self._tx_by_hash = MappingProxyType({tx.hash: tx for tx in txs})
        self._tx_blocks = [tx.block for tx in txs]

        by_parent: dict[TxHash, list[InternalTx]] = defaultdict(list)
        for itx in internal_txs:
            by_parent[itx.parent_hash].append(itx)
        self._internal = MappingProxyType(
            {h: tuple(sorted(v, key=lambda i: i.trace_index)) for h, v in by_parent.items()}
        )

        self._contracts = MappingProxyType({c.address: c for c in contracts})
        self._tokens = MappingProxyType({t.address: t for t in sorted(tokens, key=lambda t: t.address)})

        def transfer_key(ev: TransferEvent) -> tuple[int, int, int]:
            tx = self._tx_by_hash[ev.tx_hash]
            return (tx.block, tx.index, ev.log_index)

        ordered = sorted(transfers, key=transfer_key)
        self._n_transfers = len(ordered)
        by_token: dict[Address, list[TransferEvent]] = defaultdict(list)
        by_tx: dict[TxHash, list[TransferEvent]] = defaultdict(list)
        by_recipient: dict[Address, list[TransferEvent]] = defaultdict(list)
        for ev in ordered:
            by_token[ev.token].append(ev)
            by_tx[ev.tx_hash].append(ev)
            by_recipient[ev.to].append(ev)
        self._transfers_by_token = MappingProxyType({k: tuple(v) for k, v in by_token.items()})
        self._transfers_by_tx = MappingProxyType({k: tuple(v) for k, v in by_tx.items()})
        self._transfers_to = MappingProxyType({k: tuple(v) for k, v in by_recipient.items()})

        sends_to: dict[Address, list[tuple[int, ExternalTx]]] = defaultdict(list)
        sends_from: dict[Address, list[tuple[int, ExternalTx]]] = defaultdict(list)
        edges: dict[Address, dict[Address, int]] = defaultdict(lambda: defaultdict(int))
        for tx in txs:
            if not tx.status or tx.value_wei <= 0 or tx.to is None:
                continue
            ts = self._blocks[tx.block]
            sends_to[tx.to].append((ts, tx))
            sends_from[tx.sender].append((ts, tx))
            edges[tx.sender][tx.to] += tx.value_wei
        for parent, itxs in self._internal.items():
            if not self._tx_by_hash[parent].status:
                continue
            for itx in itxs:
                if itx.value_wei > 0 and itx.call_type not in (CallType.STATICCALL, CallType.DELEGATECALL):
                    edges[itx.sender][itx.to] += itx.value_wei
        self._eth_to = MappingProxyType({k: _TimeIndex(v) for k, v in sends_to.items()})
        self._eth_from = MappingProxyType({k: _TimeIndex(v) for k, v in sends_from.items()})
        self._value_edges = MappingProxyType(
            {src: MappingProxyType(dict(sorted(dsts.items()))) for src, dsts in edges.items()}
        )

    # -- blocks and transactions ------------------------------------------

    def block_timestamp(self, number: int) -> int:
        return self._blocks[number]

    def blocks(self) -> list[Block]:
        return [Block(n, self._blocks[n]) for n in self._block_numbers]

    def transactions(self) -> tuple[ExternalTx, ...]:
        return self._txs

    def tx(self, tx_hash: str) -> ExternalTx:
        return self._tx_by_hash[TxHash(tx_hash)]

    def get_tx(self, tx_hash: str) -> Optional[ExternalTx]:
        return self._tx_by_hash.get(TxHash(tx_hash))

    def tx_timestamp(self, tx_hash: str) -> int:
        return self._blocks[self.tx(tx_hash).block]

    def txs_in_blocks(self, first: int, last: int) -> tuple[ExternalTx, ...]:
        """External txs with ``first <= block <= last`` in chain order."""
        lo = bisect_left(self._tx_blocks, first)
        hi = bisect_right(self._tx_blocks, last)
        return self._txs[lo:hi]

    def internal_txs_of(self, parent_hash: str) -> tuple[InternalTx, ...]:
        return self._internal.get(TxHash(parent_hash), ())

    def internal_txs(self) -> Iterator[InternalTx]:
        for parent in sorted(self._internal):
            yield from self._internal[parent]

    # -- contracts and tokens ---------------------------------------------

    def contract(self, address: str) -> Optional[ContractRecord]:
        return self._contracts.get(Address(address))

    def contracts(self) -> list[ContractRecord]:
        return [self._contracts[a] for a in sorted(self._contracts)]

    def is_contract(self, address: str) -> bool:
        return Address(address) in self._contracts

    def token(self, address: str) -> Optional[TokenRecord]:
        return self._tokens.get(Address(address))

    def require_token(self, address: str) -> TokenRecord:
        rec = self._tokens.get(Address(address))
        if rec is None:
            raise UnknownTokenError(address)
        return rec

    def tokens(self) -> Sequence[TokenRecord]:
        return tuple(self._tokens.values())

    def creator_of(self, token: str) -> Optional[Address]:
        rec = self._contracts.get(Address(token))
        return rec.creator if rec else None

    def creation_origin(self, address: str) -> Optional[Address]:
        """EOA that sent the creation transaction (differs from creator for factory deployments)."""
        rec = self._contracts.get(Address(address))
        if rec is None:
            return None
        tx = self._tx_by_hash.get(rec.creation_tx)
        if tx is not None:
            return tx.sender
        return rec.creator

    # -- token transfers ----------------------------------------------------

    def transfers_of(self, token: str) -> tuple[TransferEvent, ...]:
        return self._transfers_by_token.get(Address(token), ())

    def transfers_in_tx(self, tx_hash: str) -> tuple[TransferEvent, ...]:
        return self._transfers_by_tx.get(TxHash(tx_hash), ())

    def transfers_to(self, address: str) -> tuple[TransferEvent, ...]:
        return self._transfers_to.get(Address(address), ())

    def transfer_timestamp(self, ev: TransferEvent) -> int:
        return self.tx_timestamp(ev.tx_hash)

    # -- ETH movement -------------------------------------------------------

    def eth_sends_to(self, recipient: str, t_start: int, t_end: int) -> tuple[ExternalTx, ...]:
        """Successful value-bearing external txs to ``recipient`` with timestamp in [t_start, t_end]."""
        if t_start > t_end:
            raise ValueError(f"inverted time range [{t_start}, {t_end}]")
        return self._eth_to.get(Address(recipient), _EMPTY_TIME_INDEX).window(t_start, t_end)

    def eth_sends_from(self, sender: str, t_start: int, t_end: int) -> tuple[ExternalTx, ...]:
        """Successful value-bearing external txs from ``sender`` with timestamp in [t_start, t_end]."""
        if t_start > t_end:
            raise ValueError(f"inverted time range [{t_start}, {t_end}]")
        return self._eth_from.get(Address(sender), _EMPTY_TIME_INDEX).window(t_start, t_end)

    def all_eth_sends_from(self, sender: str) -> tuple[ExternalTx, ...]:
        return self._eth_from.get(Address(sender), _EMPTY_TIME_INDEX).txs

    def value_edges_from(self, address: str) -> Mapping[Address, int]:
        """Summed wei moved from ``address`` to each counterparty (external + internal)."""
        return self._value_edges.get(Address(address), MappingProxyType({}))

    # -- summary --------------------------------------------------------------

    def counts(self) -> dict[str, int]:
        return {
            "blocks": len(self._blocks),
            "transactions": len(self._txs),
            "internal_transactions": sum(len(v) for v in self._internal.values()),
            "contracts": len(self._contracts),
            "tokens": len(self._tokens),
            "token_transfers": self._n_transfers,
            "rejections": len(self.rejections),
        }
