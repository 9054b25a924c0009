"""ERC-20 classification by function-selector presence."""

from __future__ import annotations

# keccak256(signature)[:4] for the mandatory ERC-20 functions
MANDATORY_SELECTORS: dict[str, bytes] = {
    "totalSupply()": bytes.fromhex("18160ddd"),
    "balanceOf(address)": bytes.fromhex("70a08231"),
    "transfer(address,uint256)": bytes.fromhex("a9059cbb"),
    "transferFrom(address,address,uint256)": bytes.fromhex("23b872dd"),
    "approve(address,uint256)": bytes.fromhex("095ea7b3"),
    "allowance(address,address)": bytes.fromhex("dd62ed3e"),
}

OPTIONAL_SELECTORS: dict[str, bytes] = {
    "name()": bytes.fromhex("06fdde03"),
    "symbol()": bytes.fromhex("95d89b41"),
    "decimals()": bytes.fromhex("313ce567"),
}


def missing_selectors(bytecode: bytes) -> list[str]:
    return [sig for sig, sel in MANDATORY_SELECTORS.items() if sel not in bytecode]


def detect_erc20(bytecode: bytes) -> bool:
    """True iff every mandatory ERC-20 selector occurs in the runtime code."""
    if not bytecode:
        return False
    return all(sel in bytecode for sel in MANDATORY_SELECTORS.values())


def selector_stub(extra: bytes = b"") -> bytes:
    """Minimal runtime stub carrying all six mandatory selectors as PUSH4 operands."""
    code = bytearray(b"\x60\x80\x60\x40\x52")
    for sel in MANDATORY_SELECTORS.values():
        code += b"\x63" + sel + b"\x14"
    return bytes(code) + extra
