"""Typed ledger records.

Addresses and hashes are ``str`` subclasses holding the canonical lowercase
``0x`` form, so they hash, sort and serialize like plain strings.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional


class Address(str):
    """20-byte account identifier in canonical lowercase hex."""

    __slots__ = ()
    _NBYTES = 20

    def __new__(cls, value: "str | bytes") -> "Address":
        if isinstance(value, cls):
            return value
        if isinstance(value, (bytes, bytearray)):
            if len(value) != cls._NBYTES:
                raise ValueError(f"expected {cls._NBYTES} bytes, got {len(value)}")
            return super().__new__(cls, "0x" + bytes(value).hex())
        if not isinstance(value, str):
            raise TypeError(f"cannot build {cls.__name__} from {type(value).__name__}")
        text = value.strip()
        if text[:2].lower() != "0x":
            raise ValueError(f"missing 0x prefix: {value!r}")
        body = text[2:].lower()
        if len(body) != 2 * cls._NBYTES:
            raise ValueError(f"expected {2 * cls._NBYTES} hex digits: {value!r}")
        try:
            bytes.fromhex(body)
        except ValueError:
            raise ValueError(f"not hex: {value!r}") from None
        return super().__new__(cls, "0x" + body)

    @property
    def raw(self) -> bytes:
        return bytes.fromhex(self[2:])


class TxHash(Address):
    """32-byte transaction hash in canonical lowercase hex."""

    __slots__ = ()
    _NBYTES = 32


ZERO_ADDRESS = Address("0x" + "00" * 20)


def parse_hex_bytes(value: str) -> bytes:
    """Decode a ``0x``-prefixed (or bare) hex string of any even length."""
    text = value.strip()
    if text[:2].lower() == "0x":
        text = text[2:]
    return bytes.fromhex(text)


class CallType(str, enum.Enum):
    CALL = "call"
    CREATE = "create"
    SUICIDE = "suicide"
    STATICCALL = "staticcall"
    DELEGATECALL = "delegatecall"


@dataclass(frozen=True, slots=True)
class Block:
    number: int
    timestamp: int


@dataclass(frozen=True, slots=True)
class ExternalTx:
    hash: TxHash
    block: int
    sender: Address
    to: Optional[Address]
    value_wei: int
    input_data: bytes = b""
    status: bool = True
    # position within the block, taken from input order
    index: int = 0


@dataclass(frozen=True, slots=True)
class InternalTx:
    parent_hash: TxHash
    trace_index: int
    sender: Address
    to: Address
    value_wei: int
    call_type: CallType = CallType.CALL


@dataclass(frozen=True, slots=True)
class ContractRecord:
    address: Address
    creator: Address
    creation_tx: TxHash
    bytecode: bytes
    created_block: int
    created_via_internal: bool = False


@dataclass(frozen=True, slots=True)
class TokenRecord:
    address: Address
    name: str
    symbol: str
    decimals: int
    total_supply_raw: int


@dataclass(frozen=True, slots=True)
class TransferEvent:
    tx_hash: TxHash
    log_index: int
    token: Address
    sender: Address
    to: Address
    amount_raw: int


@dataclass(frozen=True)
class LabelSet:
    exchange_addresses: frozenset[Address] = field(default_factory=frozenset)
    trusted_creators: frozenset[Address] = field(default_factory=frozenset)
    official_token_allowlist: frozenset[Address] = field(default_factory=frozenset)
    migrated_token_allowlist: frozenset[Address] = field(default_factory=frozenset)

    @classmethod
    def from_json(cls, data: dict) -> "LabelSet":
        def addrs(key: str) -> frozenset[Address]:
            return frozenset(Address(a) for a in data.get(key, ()))

        return cls(
            exchange_addresses=addrs("exchanges"),
            trusted_creators=addrs("trusted_creators"),
            official_token_allowlist=addrs("official_tokens"),
            migrated_token_allowlist=addrs("migrated_tokens"),
        )

    def to_json(self) -> dict:
        return {
            "exchanges": sorted(self.exchange_addresses),
            "trusted_creators": sorted(self.trusted_creators),
            "official_tokens": sorted(self.official_token_allowlist),
            "migrated_tokens": sorted(self.migrated_token_allowlist),
        }


@dataclass(frozen=True, slots=True)
class Rejection:
    """An input line that could not be indexed."""

    file: str
    line: int
    reason: str
    detail: str = ""

    def to_json(self) -> dict:
        return {"file": self.file, "line": self.line, "reason": self.reason, "detail": self.detail}
