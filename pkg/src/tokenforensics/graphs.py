"""Creator, holder and money-flow graphs plus per-token activity statistics."""

from __future__ import annotations

import csv
import io
import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx

from .chain_store import ZERO_ADDRESS, Address, IndexedLedger, LabelSet
from .counterfeit import CounterfeitCandidate, TargetToken, Verdict

log = logging.getLogger(__name__)

SECONDS_PER_DAY = 86_400
DEFAULT_MAX_DEPTH = 4
DEFAULT_MIN_EDGE_WEI = 10**15  # 0.001 ETH


def graph_to_json(g: nx.DiGraph, weight_key: str | None = None) -> dict:
    nodes = [{"id": n, **{k: v for k, v in sorted(d.items())}} for n, d in sorted(g.nodes(data=True))]
    edges = []
    for src, dst, d in sorted(g.edges(data=True), key=lambda e: (e[0], e[1])):
        e = {"src": src, "dst": dst}
        if weight_key:
            e[weight_key] = str(d.get(weight_key, 0))
        edges.append(e)
    return {"nodes": nodes, "edges": edges}


# -- token creator graph ------------------------------------------------------


@dataclass
class CreatorGraph:
    graph: nx.DiGraph
    # token -> targets it imitates
    token_targets: dict[Address, frozenset[Address]]
    # token -> EOA ultimately responsible for its creation
    token_origin: dict[Address, Address]

    def tokens_created_by(self, creator: str) -> list[Address]:
        c = Address(creator)
        return sorted(t for t, d in self.graph.nodes(data=True) if d["type"] == "counterfeit_token" and self.token_origin.get(t) == c)

    def creator_token_count(self, creator: str) -> int:
        return len(self.tokens_created_by(creator))

    def creator_target_count(self, creator: str) -> int:
        return len({tg for t in self.tokens_created_by(creator) for tg in self.token_targets[t]})

    def creator_targets(self) -> dict[Address, frozenset[Address]]:
        out: dict[Address, set[Address]] = defaultdict(set)
        for token, origin in self.token_origin.items():
            out[origin] |= self.token_targets[token]
        return {c: frozenset(s) for c, s in sorted(out.items())}

    @property
    def contract_created(self) -> int:
        return sum(
            1
            for t, d in self.graph.nodes(data=True)
            if d["type"] == "counterfeit_token"
            and any(self.graph.nodes[p]["type"] == "contract_creator" for p in self.graph.predecessors(t))
        )

    def top_creators(self, n: int = 5) -> list[dict]:
        rows = [
            {"creator": c, "tokens": len(self.tokens_created_by(c)), "targets": len(tg)}
            for c, tg in self.creator_targets().items()
        ]
        rows.sort(key=lambda r: (-r["tokens"], -r["targets"], r["creator"]))
        return rows[:n]

    def to_json(self) -> dict:
        out = graph_to_json(self.graph)
        out["contract_created_tokens"] = self.contract_created
        return out


def build_creator_graph(ledger: IndexedLedger, counterfeits: Iterable[CounterfeitCandidate]) -> CreatorGraph:
    """Directed creation graph over confirmed counterfeit tokens.

    Factory-deployed tokens get an extra hop from the EOA that called the
    factory.
    """
    targets: dict[Address, set[Address]] = defaultdict(set)
    for c in counterfeits:
        if c.filter_verdict is Verdict.CONFIRMED:
            targets[c.token].add(c.target.address)

    g = nx.DiGraph()
    origin: dict[Address, Address] = {}
    for token in sorted(targets):
        rec = ledger.contract(token)
        g.add_node(token, type="counterfeit_token")
        if rec is None:
            log.warning("counterfeit %s has no contract record", token)
            continue
        if rec.created_via_internal:
            eoa = ledger.creation_origin(token) or rec.creator
            g.add_node(rec.creator, type="contract_creator")
            if eoa != rec.creator:
                if eoa not in g or g.nodes[eoa].get("type") != "contract_creator":
                    g.add_node(eoa, type="eoa_creator")
                g.add_edge(eoa, rec.creator)
            origin[token] = eoa
        else:
            if rec.creator not in g or g.nodes[rec.creator].get("type") != "contract_creator":
                g.add_node(rec.creator, type="eoa_creator")
            origin[token] = rec.creator
        g.add_edge(rec.creator, token)

    for n, d in g.nodes(data=True):
        if d["type"] != "counterfeit_token":
            d["tokens_created"] = sum(1 for s in g.successors(n) if g.nodes[s]["type"] == "counterfeit_token")
    return CreatorGraph(g, {t: frozenset(s) for t, s in targets.items()}, origin)


# -- creator co-occurrence ----------------------------------------------------


@dataclass
class CooccurrenceMatrix:
    targets: list[TargetToken]
    counts: list[list[int]]

    def index(self, target: str) -> int:
        a = Address(target)
        for i, t in enumerate(self.targets):
            if t.address == a:
                return i
        raise KeyError(target)

    def cell(self, a: str, b: str) -> int:
        return self.counts[self.index(a)][self.index(b)]

    def to_json(self) -> dict:
        return {
            "targets": [t.symbol or t.name for t in self.targets],
            "addresses": [t.address for t in self.targets],
            "counts": self.counts,
        }


def creator_cooccurrence(graph: CreatorGraph, targets: Sequence[TargetToken]) -> CooccurrenceMatrix:
    """Cell (A, B) counts creators who counterfeited both A and B; the diagonal counts creators of A."""
    ordered = sorted(targets, key=lambda t: (t.cap_rank, t.address))
    pos = {t.address: i for i, t in enumerate(ordered)}
    n = len(ordered)
    m = [[0] * n for _ in range(n)]
    for hit in graph.creator_targets().values():
        idx = sorted(pos[a] for a in hit if a in pos)
        for i in idx:
            for j in idx:
                m[i][j] += 1
    return CooccurrenceMatrix(ordered, m)


# -- token statistics ---------------------------------------------------------


@dataclass
class BalanceReplay:
    balances: dict[Address, int]
    minted: int = 0
    burned: int = 0
    violations: list[tuple[str, int]] = field(default_factory=list)

    @property
    def holders(self) -> dict[Address, int]:
        return {a: b for a, b in self.balances.items() if b > 0}


def replay_balances(ledger: IndexedLedger, token: str) -> BalanceReplay:
    """Replay every transfer; the zero address mints and burns.

    A transfer exceeding its sender's balance is skipped and recorded as a
    violation, so balances never go negative.
    """
    rep = BalanceReplay(balances={})
    bal = rep.balances
    for ev in ledger.transfers_of(token):
        if ev.sender == ZERO_ADDRESS:
            rep.minted += ev.amount_raw
        else:
            have = bal.get(ev.sender, 0)
            if have < ev.amount_raw:
                rep.violations.append((ev.tx_hash, ev.log_index))
                continue
            bal[ev.sender] = have - ev.amount_raw
        if ev.to == ZERO_ADDRESS:
            rep.burned += ev.amount_raw
        else:
            bal[ev.to] = bal.get(ev.to, 0) + ev.amount_raw
    return rep


@dataclass(frozen=True)
class TokenStats:
    token: Address
    tx_count: int
    first_transfer: int | None
    last_transfer: int | None
    active_days: int
    holder_count: int
    total_supply_raw: int
    consistent: bool = True

    CSV_HEADER = ("token", "tx_count", "first_ts", "last_ts", "active_days", "holders", "total_supply_raw")

    def csv_row(self) -> tuple:
        return (
            self.token,
            self.tx_count,
            "" if self.first_transfer is None else self.first_transfer,
            "" if self.last_transfer is None else self.last_transfer,
            self.active_days,
            self.holder_count,
            self.total_supply_raw,
        )


def token_stats(ledger: IndexedLedger, token: str) -> TokenStats:
    rec = ledger.require_token(token)
    events = ledger.transfers_of(rec.address)
    times = [ledger.transfer_timestamp(ev) for ev in events]
    first = min(times) if times else None
    last = max(times) if times else None
    active = (last - first) // SECONDS_PER_DAY if len(times) > 1 else 0
    rep = replay_balances(ledger, rec.address)
    if rep.violations:
        log.warning("token %s: %d transfers exceed sender balance", rec.address, len(rep.violations))
    return TokenStats(
        token=rec.address,
        tx_count=len(events),
        first_transfer=first,
        last_transfer=last,
        active_days=active,
        holder_count=len(rep.holders),
        total_supply_raw=rec.total_supply_raw,
        consistent=not rep.violations,
    )


def stats_csv(stats: Iterable[TokenStats]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TokenStats.CSV_HEADER)
    for s in stats:
        w.writerow(s.csv_row())
    return buf.getvalue()


# -- holder graph -------------------------------------------------------------


@dataclass
class HolderGraph:
    graph: nx.DiGraph

    def holder_summary(self, n: int = 5) -> list[dict]:
        rows = []
        for node, d in self.graph.nodes(data=True):
            if d["type"] != "holder":
                continue
            toks = list(self.graph.successors(node))
            tgs = {a for t in toks for a in self.graph.nodes[t]["targets"]}
            rows.append({"holder": node, "tokens": len(toks), "targets": len(tgs)})
        rows.sort(key=lambda r: (-r["tokens"], -r["targets"], r["holder"]))
        return rows[:n]

    def to_json(self) -> dict:
        out = graph_to_json(self.graph, weight_key="balance_raw")
        for node in out["nodes"]:
            if "targets" in node:
                node["targets"] = sorted(node["targets"])
        return out


def build_holder_graph(ledger: IndexedLedger, counterfeits: Iterable[CounterfeitCandidate]) -> HolderGraph:
    """Bipartite holder -> token graph weighted by the replayed balance."""
    targets: dict[Address, set[Address]] = defaultdict(set)
    for c in counterfeits:
        if c.filter_verdict is Verdict.CONFIRMED:
            targets[c.token].add(c.target.address)
    g = nx.DiGraph()
    for token in sorted(targets):
        g.add_node(token, type="counterfeit_token", targets=frozenset(targets[token]))
        for holder, bal in sorted(replay_balances(ledger, token).holders.items()):
            if holder not in g:
                g.add_node(holder, type="holder")
            g.add_edge(holder, token, balance_raw=bal)
    return HolderGraph(g)


# -- money flow ---------------------------------------------------------------

NODE_PRECEDENCE = ("exchange", "scam", "fund_transfer", "frontier")


@dataclass
class MoneyFlowGraph:
    graph: nx.DiGraph
    max_depth: int
    depth_reached: int

    def nodes_of_type(self, kind: str) -> list[Address]:
        return sorted(n for n, d in self.graph.nodes(data=True) if d["type"] == kind)

    def to_json(self) -> dict:
        out = graph_to_json(self.graph, weight_key="weight_wei")
        out["max_depth"] = self.max_depth
        out["depth_reached"] = self.depth_reached
        return out


def trace_money_flow(
    ledger: IndexedLedger,
    scam_addresses: Iterable[str],
    labels: LabelSet,
    max_depth: int = DEFAULT_MAX_DEPTH,
    min_edge_wei: int = DEFAULT_MIN_EDGE_WEI,
) -> MoneyFlowGraph:
    """Breadth-first walk along outgoing ETH from the scam addresses.

    Exchange-labeled nodes are sinks. Nodes first reached at ``max_depth``
    are not expanded and are typed ``frontier``.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    scams = sorted({Address(a) for a in scam_addresses})
    exchanges = labels.exchange_addresses
    depth: dict[Address, int] = {a: 0 for a in scams}
    g = nx.DiGraph()
    queue = deque(scams)
    expanded: set[Address] = set()
    while queue:
        node = queue.popleft()
        d = depth[node]
        if node in exchanges or d >= max_depth:
            continue
        expanded.add(node)
        for dst, wei in ledger.value_edges_from(node).items():
            if wei < min_edge_wei or dst == node:
                continue
            g.add_edge(node, dst, weight_wei=wei)
            if dst not in depth:
                depth[dst] = d + 1
                queue.append(dst)

    scam_set = set(scams)
    for a in depth:
        if a not in g:
            g.add_node(a)
        if a in exchanges:
            kind = "exchange"
        elif a in scam_set:
            kind = "scam"
        elif a in expanded:
            kind = "fund_transfer"
        else:
            kind = "frontier"
        g.nodes[a]["type"] = kind
        g.nodes[a]["depth"] = depth[a]
    reached = max((depth[n] for n in g.nodes), default=0)
    return MoneyFlowGraph(g, max_depth, reached)
