"""Pipeline stages behind the command line: each reads inputs, writes outputs and a run manifest."""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional

from . import __version__
from .chain_store import FILE_NAMES, LABELS_FILE, IndexedLedger, IngestError, LabelSet, ingest_dir, load_labels
from .counterfeit import (
    CounterfeitCandidate,
    FilterResult,
    TargetToken,
    apply_filters,
    confirmed_tokens,
    lexical_table,
    load_targets,
    scan,
)
from .graphs import (
    DEFAULT_MAX_DEPTH,
    build_creator_graph,
    build_holder_graph,
    creator_cooccurrence,
    stats_csv,
    token_stats,
    trace_money_flow,
)
from .scams import DetectionResult, DetectorConfig, detect_scams
from .synth import ScenarioConfig, generate

MANIFEST = "manifest.json"


class UsageError(Exception):
    """Bad or missing command-line input; maps to exit code 1."""


class DataError(Exception):
    """Inputs exist but cannot be used; maps to exit code 2."""


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def dump_jsonl(rows: Iterable[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True, ensure_ascii=False) + "\n" for r in rows)


@dataclass
class RunManifest:
    stage: str
    tool_version: str = __version__
    inputs: dict[str, str] = field(default_factory=dict)
    config_digests: dict[str, str] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    wall_time_seconds: float = 0.0

    def add_input(self, path: Path) -> None:
        if path.is_dir():
            for p in sorted(path.iterdir()):
                if p.is_file() and p.suffix in (".jsonl", ".json") and p.name != MANIFEST:
                    self.inputs[str(p)] = sha256_file(p)
        elif path.is_file():
            self.inputs[str(path)] = sha256_file(path)

    def to_json(self) -> dict:
        return {
            "stage": self.stage,
            "tool_version": self.tool_version,
            "inputs": self.inputs,
            "config_digests": self.config_digests,
            "counts": self.counts,
            "outputs": self.outputs,
            "wall_time_seconds": round(self.wall_time_seconds, 3),
        }


class Stage:
    """Collects output files and writes them with a manifest on ``finish``."""

    def __init__(self, name: str, out_dir: Path):
        self.manifest = RunManifest(name)
        self.out = out_dir
        self._files: dict[str, str] = {}
        self._t0 = time.perf_counter()

    def emit(self, name: str, text: str) -> None:
        self._files[name] = text

    def finish(self) -> RunManifest:
        self.out.mkdir(parents=True, exist_ok=True)
        for name, text in sorted(self._files.items()):
            data = text.encode("utf-8")
            (self.out / name).write_bytes(data)
            self.manifest.outputs[name] = sha256_bytes(data)
        self.manifest.wall_time_seconds = time.perf_counter() - self._t0
        (self.out / MANIFEST).write_text(dump_json(self.manifest.to_json()), encoding="utf-8")
        return self.manifest


# -- input loading ------------------------------------------------------------

def open_ledger(ledger_dir: Optional[Path], labels_path: Optional[Path], threads: int, manifest: RunManifest) -> IndexedLedger:
    if ledger_dir is None:
        raise UsageError("--ledger is required")
    if not ledger_dir.is_dir():
        raise UsageError(f"--ledger: not a directory: {ledger_dir}")
    if not any((ledger_dir / f).exists() for f in FILE_NAMES.values()):
        raise UsageError(f"--ledger: no ledger files found in {ledger_dir}")
    labels = None
    if labels_path is not None:
        if not labels_path.is_file():
            raise UsageError(f"--labels: file not found: {labels_path}")
        try:
            labels = load_labels(labels_path)
        except (ValueError, KeyError, TypeError, OSError) as exc:
            raise DataError(f"--labels: {exc}") from exc
        manifest.add_input(labels_path)
    manifest.add_input(ledger_dir)
    try:
        ledger = ingest_dir(ledger_dir, labels=labels, threads=threads)
    except (IngestError, OSError, ValueError) as exc:
        raise DataError(str(exc)) from exc
    manifest.counts.update({f"ledger_{k}": v for k, v in ledger.counts().items()})
    return ledger


def open_targets(path: Optional[Path], manifest: RunManifest) -> list[TargetToken]:
    if path is None:
        raise UsageError("--targets is required")
    if not path.is_file():
        raise UsageError(f"--targets: file not found: {path}")
    try:
        targets = load_targets(path)
    except (ValueError, KeyError, TypeError) as exc:
        raise DataError(f"--targets: {exc}") from exc
    if not targets:
        raise UsageError("--targets: file lists no target tokens")
    manifest.add_input(path)
    return targets


def open_config(path: Optional[Path], manifest: RunManifest) -> DetectorConfig:
    if path is None:
        cfg = DetectorConfig()
    else:
        if not path.is_file():
            raise UsageError(f"--config: file not found: {path}")
        try:
            cfg = DetectorConfig.load(path)
        except (ValueError, TypeError) as exc:
            raise DataError(f"--config: {exc}") from exc
        manifest.add_input(path)
    manifest.config_digests["detector"] = sha256_bytes(json.dumps(cfg.to_json(), sort_keys=True).encode())
    return cfg


# -- stages -------------------------------------------------------------------

def run_ingest(ledger_dir, labels_path, out_dir: Path, threads: int) -> RunManifest:
    st = Stage("ingest", out_dir)
    ledger = open_ledger(ledger_dir, labels_path, threads, st.manifest)
    st.emit("ledger_counts.json", dump_json(ledger.counts()))
    st.emit("rejections.jsonl", dump_jsonl(r.to_json() for r in ledger.rejections))
    return st.finish()


def _scan(ledger: IndexedLedger, targets: list[TargetToken], threads: int) -> FilterResult:
    return apply_filters(scan(ledger, targets, threads=threads), ledger.labels)


def _emit_candidates(st: Stage, result: FilterResult) -> list[CounterfeitCandidate]:
    everything = result.all()
    st.emit("candidates.jsonl", dump_jsonl(c.to_json() for c in everything))
    st.emit("review_queue.jsonl", dump_jsonl(c.to_json() for c in result.needs_review))
    st.manifest.counts.update(
        candidates=len(everything),
        confirmed=len(result.confirmed),
        filtered=len(result.filtered),
        needs_review=len(result.needs_review),
    )
    return everything


def run_scan(ledger_dir, targets_path, labels_path, out_dir: Path, threads: int) -> RunManifest:
    st = Stage("scan", out_dir)
    targets = open_targets(targets_path, st.manifest)
    ledger = open_ledger(ledger_dir, labels_path, threads, st.manifest)
    everything = _emit_candidates(st, _scan(ledger, targets, threads))
    st.emit("lexical_table.json", dump_json(lexical_table(everything)))
    return st.finish()


def _official(ledger: IndexedLedger, targets: list[TargetToken]) -> set[str]:
    return set(ledger.labels.official_token_allowlist) | {t.address for t in targets}


def _detect(ledger, targets, cfg, threads) -> tuple[FilterResult, DetectionResult]:
    result = _scan(ledger, targets, threads)
    det = detect_scams(ledger, confirmed_tokens(result.all()), _official(ledger, targets), cfg, threads=threads)
    return result, det


def _emit_detection(st: Stage, det: DetectionResult) -> None:
    st.emit("airdrop_findings.jsonl", dump_jsonl(f.to_json() for f in det.airdrops))
    st.emit("arbitrage_evidence.jsonl", dump_jsonl(e.to_json() for e in det.arbitrage))
    st.emit("summary.json", dump_json(det.summary.to_json()))
    st.manifest.counts.update(airdrop_findings=len(det.airdrops), arbitrage_evidence=len(det.arbitrage))


def run_detect(ledger_dir, targets_path, labels_path, config_path, out_dir: Path, threads: int) -> RunManifest:
    st = Stage("detect", out_dir)
    targets = open_targets(targets_path, st.manifest)
    cfg = open_config(config_path, st.manifest)
    ledger = open_ledger(ledger_dir, labels_path, threads, st.manifest)
    result, det = _detect(ledger, targets, cfg, threads)
    _emit_candidates(st, result)
    _emit_detection(st, det)
    return st.finish()


def scam_addresses(det: DetectionResult) -> set[str]:
    return set(det.summary.airdrop.role_union | det.summary.arbitrage.role_union)


def run_graph(ledger_dir, targets_path, labels_path, config_path, out_dir: Path, threads: int, max_depth: int) -> RunManifest:
    if max_depth < 1:
        raise UsageError("--max-depth must be >= 1")
    st = Stage("graph", out_dir)
    targets = open_targets(targets_path, st.manifest)
    cfg = open_config(config_path, st.manifest)
    ledger = open_ledger(ledger_dir, labels_path, threads, st.manifest)
    result, det = _detect(ledger, targets, cfg, threads)
    confirmed = result.confirmed
    creators = build_creator_graph(ledger, confirmed)
    holders = build_holder_graph(ledger, confirmed)
    flow = trace_money_flow(ledger, scam_addresses(det), ledger.labels, max_depth=max_depth)
    stats = [token_stats(ledger, t) for t in confirmed_tokens(confirmed)]
    st.emit("creator_graph.json", dump_json(creators.to_json()))
    st.emit("holder_graph.json", dump_json(holders.to_json()))
    st.emit("cooccurrence.json", dump_json(creator_cooccurrence(creators, targets).to_json()))
    st.emit("money_flow.json", dump_json(flow.to_json()))
    st.emit("token_stats.csv", stats_csv(stats))
    st.manifest.counts.update(
        creator_graph_nodes=creators.graph.number_of_nodes(),
        holder_graph_nodes=holders.graph.number_of_nodes(),
        money_flow_nodes=flow.graph.number_of_nodes(),
        token_stats_rows=len(stats),
    )
    return st.finish()


def target_table(ledger: IndexedLedger, targets: list[TargetToken], candidates: Iterable[CounterfeitCandidate]) -> list[dict]:
    """One row per target: confirmed counterfeit count and their transfer volume."""
    per_target: dict[str, set[str]] = {t.address: set() for t in targets}
    for c in candidates:
        if c.filter_verdict.value == "confirmed":
            per_target[c.target.address].add(c.token)
    rows = []
    for t in targets:
        tokens = per_target[t.address]
        rows.append({
            "cap_rank": t.cap_rank,
            "name": t.name,
            "symbol": t.symbol,
            "address": t.address,
            "counterfeit_tokens": len(tokens),
            "transactions": sum(len(ledger.transfers_of(tok)) for tok in tokens),
        })
    return rows


def run_report(ledger_dir, targets_path, labels_path, config_path, out_dir: Path, threads: int) -> RunManifest:
    st = Stage("report", out_dir)
    targets = open_targets(targets_path, st.manifest)
    cfg = open_config(config_path, st.manifest)
    ledger = open_ledger(ledger_dir, labels_path, threads, st.manifest)
    result, det = _detect(ledger, targets, cfg, threads)
    everything = result.all()
    report = {
        "tool_version": __version__,
        "ledger": ledger.counts(),
        "targets": target_table(ledger, targets, everything),
        "lexical": lexical_table(result.confirmed),
        "scams": det.summary.to_json(),
        "counterfeits": {
            "candidates": len(everything),
            "confirmed": len(result.confirmed),
            "filtered": len(result.filtered),
            "needs_review": len(result.needs_review),
        },
    }
    st.emit("report.json", dump_json(report))
    st.manifest.counts.update(report["counterfeits"])
    return st.finish()


def run_synth(scenario_path: Optional[Path], out_dir: Path) -> RunManifest:
    if scenario_path is None:
        raise UsageError("--scenario is required")
    if not scenario_path.is_file():
        raise UsageError(f"--scenario: file not found: {scenario_path}")
    st = Stage("synth", out_dir)
    try:
        cfg = ScenarioConfig.load(scenario_path)
        synthetic = generate(cfg)
    except (ValueError, TypeError) as exc:
        raise DataError(f"--scenario: {exc}") from exc
    st.manifest.add_input(scenario_path)
    st.manifest.config_digests["scenario"] = sha256_bytes(json.dumps(cfg.to_json(), sort_keys=True).encode())
    for name, text in synthetic.all_files().items():
        st.emit(name, text)
    st.manifest.counts.update(
        counterfeits=len(synthetic.truth.counterfeits),
        airdrop_campaigns=len(synthetic.truth.airdrop),
        arbitrage_campaigns=len(synthetic.truth.arbitrage),
        undetectable=len(synthetic.truth.undetectable),
    )
    return st.finish()


__all__ = [
    "DEFAULT_MAX_DEPTH",
    "DataError",
    "LABELS_FILE",
    "LabelSet",
    "RunManifest",
    "UsageError",
    "run_detect",
    "run_graph",
    "run_ingest",
    "run_report",
    "run_scan",
    "run_synth",
    "target_table",
]
