"""Small hand-built ledgers for unit tests.

Block numbers equal timestamps here, which keeps time arithmetic in tests
readable: a tx "at t=1000" lives in block 1000.
"""

from __future__ import annotations

import hashlib
from typing import Optional

from tokenforensics.chain_store import LabelSet, ledger_from_records
from tokenforensics.chain_store.erc20 import selector_stub
from tokenforensics.graphs import build_creator_graph, creator_cooccurrence, replay_balances

ZERO = "0x" + "00" * 20


def addr(label: str) -> str:
    return "0x" + hashlib.sha256(f"addr|{label}".encode()).hexdigest()[:40]


def txh(label: str) -> str:
    return "0x" + hashlib.sha256(f"tx|{label}".encode()).hexdigest()


class ChainFixture:
    def __init__(self):
        self.records: dict[str, list[dict]] = {
            "blocks": [],
            "transactions": [],
            "internal_transactions": [],
            "contracts": [],
            "token_transfers": [],
            "token_metadata": [],
        }
        self._blocks: set[int] = set()
        self._logs: dict[str, int] = {}
        self._n = 0

    def _block(self, t: int) -> None:
        if t not in self._blocks:
            self._blocks.add(t)

    def tx(self, t: int, sender: str, to: Optional[str], value_wei: int = 0, *, status: bool = True, label: str | None = None) -> str:
        self._n += 1
        h = txh(label or f"auto-{self._n}")
        self._block(t)
        self.records["transactions"].append(
            {"hash": h, "block": t, "from": sender, "to": to, "value_wei": str(value_wei), "input": "0x", "status": status}
        )
        return h

    def internal(self, parent: str, index: int, sender: str, to: str, value_wei: int, call_type: str = "call") -> None:
        self.records["internal_transactions"].append(
            {"parent_hash": parent, "trace_index": index, "from": sender, "to": to, "value_wei": str(value_wei), "call_type": call_type}
        )

    def transfer(self, tx_hash: str, token: str, sender: str, to: str, amount: int) -> int:
        idx = self._logs.get(tx_hash, 0)
        self._logs[tx_hash] = idx + 1
        self.records["token_transfers"].append(
            {"tx_hash": tx_hash, "log_index": idx, "token": token, "from": sender, "to": to, "amount_raw": str(amount)}
        )
        return idx

    def contract(self, label: str, creator: str, t: int = 1, bytecode: bytes = b"\x60\x80", via: Optional[str] = None) -> str:
        """Deploy a contract; with ``via`` the EOA ``creator`` calls factory ``via``."""
        a = addr(label)
        if via is None:
            h = self.tx(t, creator, None, label=f"create/{label}")
            direct = creator
        else:
            h = self.tx(t, creator, via, label=f"create/{label}")
            self.internal(h, 0, via, a, 0, "create")
            direct = via
        self.records["contracts"].append(
            {"address": a, "creator": direct, "creation_tx": h, "bytecode": "0x" + bytecode.hex(), "created_block": t}
        )
        self._creation = h
        return a

    def token(
        self, label: str, name: str, symbol: str, *, creator: Optional[str] = None, decimals: int = 18,
        supply: int = 0, holder: Optional[str] = None, t: int = 1, via: Optional[str] = None,
    ) -> str:
        creator = creator or addr(f"{label}/creator")
        a = self.contract(label, creator, t, selector_stub(label.encode()), via)
        if supply:
            self.transfer(self._creation, a, ZERO, holder or creator, supply)
        self.records["token_metadata"].append(
            {"address": a, "name": name, "symbol": symbol, "decimals": decimals, "total_supply_raw": str(supply)}
        )
        return a

    def ledger(self, labels: Optional[LabelSet] = None):
        recs = dict(self.records)
        recs["blocks"] = [{"number": b, "timestamp": b} for b in sorted(self._blocks)]
        return ledger_from_records(recs, labels)


# -- shared oracles -------------------------------------------------------------

def linear_scan_latest(txs, victim, t, cfg):
    """Oracle for latest-send selection: argmax by time over every qualifying send."""
    best = None
    for tx in txs:
        ts = tx.block  # block number == timestamp in fixtures
        if tx.sender != victim or tx.to is None or not tx.status or tx.value_wei < cfg.min_eth_wei:
            continue
        if t - cfg.window_seconds <= ts < t and (best is None or (ts, tx.index) > (best.block, best.index)):
            best = tx
    return best


def randomized_victims(rng, cfg, n: int, distributor: str):
    """A fake token plus ``n`` victims, each with 0-6 random sends around one token return.

    Returns (fixture, token, [(victim, return_time)]).
    """
    f = ChainFixture()
    tok = f.token("fake", "HuobiToken", "HT", supply=10**30, holder=distributor)
    returns = []
    for i in range(n):
        v = addr(f"victim{i}")
        base = 10_000 + i * 50_000
        for _ in range(rng.randint(0, 6)):
            dt = rng.randint(-2 * cfg.window_seconds, 2 * cfg.window_seconds)
            value = rng.choice([10**15, 10**16, 10**18, 3 * 10**18])
            f.tx(base + dt, v, addr(f"S{rng.randrange(5)}"), value, status=rng.random() > 0.1)
        returns.append((v, base + rng.randint(0, 3)))
    for v, t in returns:
        h = f.tx(t, distributor, tok)
        f.transfer(h, tok, distributor, v, 10**18)
    return f, tok, returns


def graph_property_violations(ledger, targets, confirmed) -> list[str]:
    """Structural invariants every generated ledger must satisfy; returns human-readable failures."""
    bad = []
    g = build_creator_graph(ledger, confirmed)
    m = creator_cooccurrence(g, targets).counts
    n = len(m)
    creators = {n_ for n_, d in g.graph.nodes(data=True) if d["type"] == "eoa_creator"}
    for i in range(n):
        if not 0 <= m[i][i] <= len(creators):
            bad.append(f"diagonal {i} out of range: {m[i][i]}")
        for j in range(n):
            if m[i][j] != m[j][i]:
                bad.append(f"asymmetric cell ({i},{j})")
            if m[i][j] > min(m[i][i], m[j][j]):
                bad.append(f"cell ({i},{j}) exceeds its diagonals")
    for node, d in g.graph.nodes(data=True):
        if d["type"] == "counterfeit_token" and g.graph.in_degree(node) != 1:
            bad.append(f"token {node} has in-degree {g.graph.in_degree(node)}")
    for rec in ledger.tokens():
        rep = replay_balances(ledger, rec.address)
        if rep.violations:
            bad.append(f"token {rec.address} overdraws {len(rep.violations)} times")
        if any(b < 0 for b in rep.balances.values()):
            bad.append(f"token {rec.address} has a negative balance")
        if sum(rep.balances.values()) != rep.minted - rep.burned:
            bad.append(f"token {rec.address} does not conserve supply")
    return bad
