from __future__ import annotations

import json
import sys
from dataclasses import asdict, dataclass, fields
from decimal import Decimal
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

WEI_PER_ETH = 10**18


def load_structured(path: str | Path) -> dict:
    """Read a TOML file, or JSON when the suffix is ``.json``."""
    p = Path(path)
    if p.suffix.lower() == ".json":
        return json.loads(p.read_text(encoding="utf-8"))
    with p.open("rb") as fh:
        return tomllib.load(fh)


@dataclass(frozen=True)
class DetectorConfig:
    window_seconds: int = 7_200
    rate_rel_tol: Decimal = Decimal("0.01")
    min_airdrop_txs: int = 2
    min_eth_wei: int = 10**16
    usd_rate: Decimal = Decimal("233.64")

    def __post_init__(self):
        # accept floats/strings from config files, but keep exact decimals
        object.__setattr__(self, "rate_rel_tol", Decimal(str(self.rate_rel_tol)))
        object.__setattr__(self, "usd_rate", Decimal(str(self.usd_rate)))
        if self.window_seconds <= 0:
            raise ValueError("window_seconds must be positive")
        if self.rate_rel_tol < 0:
            raise ValueError("rate_rel_tol must be non-negative")
        if self.min_airdrop_txs < 1:
            raise ValueError("min_airdrop_txs must be at least 1")
        if self.min_eth_wei < 1:
            raise ValueError("min_eth_wei must be positive")
        if self.usd_rate <= 0:
            raise ValueError("usd_rate must be positive")

    @classmethod
    def from_mapping(cls, data: dict) -> "DetectorConfig":
        known = {f.name for f in fields(cls)}
        section = data.get("detector", data)
        extra = set(section) - known
        if extra:
            raise ValueError(f"unknown detector settings: {sorted(extra)}")
        return cls(**section)

    @classmethod
    def load(cls, path: str | Path) -> "DetectorConfig":
        return cls.from_mapping(load_structured(path))

    def to_json(self) -> dict:
        d = asdict(self)
        d["rate_rel_tol"] = str(self.rate_rel_tol)
        d["usd_rate"] = str(self.usd_rate)
        return d
