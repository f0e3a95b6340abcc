"""Timing harness: model x log-length sweeps with seeded random logs.

Only monitoring is timed; generating the logs is not.  A plan file is JSON::

    {"models": ["ACCI", "ACCD(3, 9/10)"], "lengths": [10, 100, 1000],
     "seeds": 5, "interval": ["1", "5"], "method": "direct",
     "cap": null, "timeout": 600}

``model`` (a single name or model-file path) may be given instead of
``models``.
"""
from __future__ import annotations

import json
import re
import statistics
import time
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .benchmarks import builtin_model
from .geometry import kernels
from .log import GenerationStuck, generate_log
from .model import Lha
from .modelio import load_model
from .monitor import INCONCLUSIVE, MonitorConfig, run_monitor
from .numeric import as_rational, format_rational
from .translate import method1_verdict

METHODS = ("direct", "method1", "both")
DEFAULT_LENGTHS = (10, 100, 1000)
DEFAULT_SEEDS = 5


@dataclass
class BenchPlan:
    models: list[str]
    lengths: list[int] = field(default_factory=lambda: list(DEFAULT_LENGTHS))
    seeds: int = DEFAULT_SEEDS
    interval: tuple[Fraction, Fraction] = (Fraction(1), Fraction(5))
    method: str = "direct"
    cap: int | None = None
    timeout: float | None = None  # seconds per cell
    first_seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.seeds < 1:
            raise ValueError("seeds must be positive")
        self.interval = tuple(as_rational(v) for v in self.interval)

    @classmethod
    def from_dict(cls, data: dict) -> "BenchPlan":
        models = data.get("models")
        if models is None:
            if "model" not in data:
                raise ValueError("plan needs 'model' or 'models'")
            models = [data["model"]]
        return cls(
            models=list(models),
            lengths=[int(n) for n in data.get("lengths", DEFAULT_LENGTHS)],
            seeds=int(data.get("seeds", DEFAULT_SEEDS)),
            interval=tuple(str(v) for v in data.get("interval", ("1", "5"))),
            method=data.get("method", "direct"),
            cap=data.get("cap"),
            timeout=data.get("timeout"),
            first_seed=int(data.get("first_seed", 0)),
        )

    @classmethod
    def load(cls, path: str | Path) -> "BenchPlan":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class CellResult:
    model: str
    length: int
    method: str
    times: list[float] = field(default_factory=list)
    verdicts: dict[str, int] = field(default_factory=dict)
    saturated_runs: int = 0
    accept_rate: float | None = None  # accepted indices / all indices
    agreement: bool | None = None  # method1 vs direct, "both" only
    timed_out: bool = False
    generation_failures: int = 0

    @property
    def runs(self) -> int:
        return len(self.times)

    @property
    def mean(self) -> float | None:
        return statistics.fmean(self.times) if self.times else None

    @property
    def median(self) -> float | None:
        return statistics.median(self.times) if self.times else None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["runs"] = self.runs
        out["mean"] = self.mean
        out["median"] = self.median
        return out


@dataclass
class BenchReport:
    cells: list[CellResult]
    backend: str

    def to_dict(self) -> dict:
        return {"backend": self.backend, "cells": [c.to_dict() for c in self.cells]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def resolve_model(name: str) -> Lha:
    if Path(name).is_file():
        return load_model(name)
    return builtin_model(name)


def _verdict_key(v) -> tuple:
    return tuple(v.verdicts)


def run_bench(plan: BenchPlan, progress=None) -> BenchReport:
    cfg = MonitorConfig(max_discrete_steps_per_interval=plan.cap, emit_witness=False)
    methods = ["direct", "method1"] if plan.method == "both" else [plan.method]
    cells: list[CellResult] = []
    for name in plan.models:
        m = resolve_model(name)
        for length in plan.lengths:
            row = {meth: CellResult(name, length, meth) for meth in methods}
            accepted = {meth: 0 for meth in methods}
            indices = {meth: 0 for meth in methods}
            agree = True
            spent = 0.0
            for seed in range(plan.first_seed, plan.first_seed + plan.seeds):
                if plan.timeout is not None and spent > plan.timeout:
                    for c in row.values():
                        c.timed_out = True
                    break
                try:
                    w = generate_log(m, seed, length, plan.interval)
                except GenerationStuck:
                    for c in row.values():
                        c.generation_failures += 1
                    continue
                results = {}
                for meth in methods:
                    run = run_monitor if meth == "direct" else method1_verdict
                    t0 = time.perf_counter()
                    v = run(m, w, cfg)
                    dt = time.perf_counter() - t0
                    spent += dt
                    c = row[meth]
                    c.times.append(dt)
                    for verdict in v.verdicts:
                        c.verdicts[verdict] = c.verdicts.get(verdict, 0) + 1
                    if v.saturated_intervals:
                        c.saturated_runs += 1
                    accepted[meth] += len(v.C)
                    indices[meth] += len(v.results)
                    results[meth] = v
                if len(results) == 2:
                    a, b = (_verdict_key(results[k]) for k in methods)
                    if INCONCLUSIVE not in a and INCONCLUSIVE not in b and a != b:
                        agree = False
                if progress:
                    progress(name, length, seed)
            for meth, c in row.items():
                c.accept_rate = accepted[meth] / indices[meth] if indices[meth] else None
                if len(methods) == 2:
                    c.agreement = agree
            cells.extend(row.values())
    return BenchReport(cells, kernels.active())


# ----------------------------------------------------------------------
# plot data

TIMEOUT_SENTINEL = "nan"
_DIM = re.compile(r"\(\s*(\d+)")


def _dimension(model: str) -> int | None:
    m = _DIM.search(model)
    return int(m.group(1)) if m else None


def _family(model: str) -> str:
    return model.split("(")[0].strip()


def emit_plot_data(report: BenchReport, axis: str = "length") -> str:
    """Whitespace-separated ``x seconds`` columns, one block per series.

    ``axis="length"``: one series per (model, method).  ``axis="dimension"``:
    one series per (model family, method, length), x taken from the model's
    first argument.  Timed-out cells become ``x nan`` rows tagged ``# timeout``.
    """
    if axis not in ("length", "dimension"):
        raise ValueError("axis must be 'length' or 'dimension'")
    if not report.cells:
        raise ValueError("empty report")
    series: dict[tuple, list[CellResult]] = {}
    for c in report.cells:
        if axis == "length":
            key = (c.model, c.method)
        else:
            if _dimension(c.model) is None:
                continue
            key = (_family(c.model), c.method, c.length)
        series.setdefault(key, []).append(c)
    if not series:
        raise ValueError(f"no cells usable on the {axis} axis")
    out = [f"# backend: {report.backend}", f"# columns: {axis} mean_seconds"]
    for key, cs in series.items():
        label = " ".join(str(k) for k in key)
        if len(cs) == 1:
            warnings.warn(f"series {label!r} has a single point", stacklevel=2)
        out.append(f"# series: {label}")
        cs.sort(key=lambda c: c.length if axis == "length" else _dimension(c.model))
        for c in cs:
            x = c.length if axis == "length" else _dimension(c.model)
            if c.timed_out and c.mean is None:
                out.append(f"{x} {TIMEOUT_SENTINEL} # timeout")
            elif c.timed_out:
                out.append(f"{x} {c.mean:.6f} # timeout (partial)")
            else:
                out.append(f"{x} {c.mean:.6f}")
        out.append("")
    return "\n".join(out)


# ----------------------------------------------------------------------
# kernel comparison


def compare_backends(
    model: str = "ACCI", lengths: Sequence[int] = (100, 1000), seeds: int = 3, backends: Sequence[str] | None = None
) -> dict:
    """Mean monitoring time per backend and length, with a verdict check.

    Both kernels must produce identical verdict sequences; the result maps
    ``backend -> {length: mean_seconds}`` plus ``"identical": bool``.
    """
    backends = list(backends or kernels.available())
    m = resolve_model(model)
    cfg = MonitorConfig(emit_witness=False)
    logs = {n: [generate_log(m, s, n) for s in range(seeds)] for n in lengths}
    timing: dict[str, dict[int, float]] = {}
    verdicts: dict[str, list] = {}
    prev = kernels.active()
    try:
        for b in backends:
            kernels.use(b)
            timing[b] = {}
            verdicts[b] = []
            for n, ws in logs.items():
                times = []
                for w in ws:
                    t0 = time.perf_counter()
                    v = run_monitor(m, w, cfg)
                    times.append(time.perf_counter() - t0)
                    verdicts[b].append(v.verdicts)
                timing[b][n] = statistics.fmean(times)
    finally:
        kernels.use(prev)
    first = verdicts[backends[0]]
    return {"model": model, "timing": timing, "identical": all(verdicts[b] == first for b in backends)}


def format_interval(interval: tuple[Fraction, Fraction]) -> str:
    return f"{format_rational(interval[0])}:{format_rational(interval[1])}"
