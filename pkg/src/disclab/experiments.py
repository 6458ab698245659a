"""Seeded, reproducible experiment runner.

A report is a JSON document holding the version string, the full config and
one item per (seed or parameter value) with a status of ``ok``,
``budget-exceeded`` or ``error``.  No timestamps are recorded so that a rerun
with the same config and version reproduces the report byte for byte.
"""

from __future__ import annotations

import math
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable

from .discrepancy import (
    balanced_random_colouring,
    exact_tree_discrepancy,
    local_search_colouring,
    tree_discrepancy_of_colouring,
)
from .errors import BudgetError, DiscLabError, SpecError
from .extremal import phi_exact, phi_tightness_probe
from .generators import gen_grid, gen_hypercube, gen_random_regular, grid_layers, philox, small_connected_graphs
from .graph import EdgeColouring, vertex_connectivity
from .io import dumps
from .separation import exact_separation_number, layered_separator

EXPERIMENTS = ("rrg-discrepancy", "grid-scaling", "hypercube-scaling", "eq1-suite", "phi-tightness")


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict = field(default_factory=dict)
    r: int = 2
    seeds: list = field(default_factory=lambda: [0])
    budgets: dict = field(default_factory=dict)
    output: str | None = None
    family: str = ""

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise SpecError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        if not self.seeds:
            raise SpecError("seeds must be nonempty")
        for key, value in self.budgets.items():
            if not isinstance(value, int) or value <= 0:
                raise SpecError(f"budget {key!r} must be a positive integer, got {value!r}")
        if self.r < 2:
            raise SpecError(f"need r >= 2, got {self.r}")

    def budget(self, key: str, default: int) -> int:
        return int(self.budgets.get(key, default))

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        known = {k: data[k] for k in ("experiment", "params", "r", "seeds", "budgets", "output", "family") if k in data}
        cfg = cls(**known)
        cfg.seeds = [int(s) for s in cfg.seeds]
        return cfg


def version_string() -> str:
    """``git describe`` of the source tree, or the package version outside a checkout."""
    here = Path(__file__).resolve().parent
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=here, capture_output=True, text=True, timeout=10,
        )
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    from importlib.metadata import PackageNotFoundError, version

    try:
        return version("artifact")
    except PackageNotFoundError:
        return "unknown"


def _guard(fn: Callable[[], dict]) -> dict:
    try:
        out = fn()
        out.setdefault("status", "ok")
        return out
    except BudgetError as exc:
        return {"status": "budget-exceeded", "message": str(exc)}
    except DiscLabError as exc:
        return {"status": "error", "message": str(exc)}


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


def even_colouring(m: int, r: int, seed: int) -> EdgeColouring:
    """Colour classes of equal size (up to one) in a seeded random arrangement."""
    return EdgeColouring(r, balanced_random_colouring(m, r, philox(seed)))


def rrg_item(n: int, d: int, r: int, seed: int, starts: int, rounds: int) -> dict:
    g = gen_random_regular(n, d, seed)
    simple_regular = all(deg == d for deg in g.degrees)
    kappa = vertex_connectivity(g)
    f_even = even_colouring(g.m, r, seed)
    even_value = tree_discrepancy_of_colouring(g, f_even, witness=False).value
    even_bound = r * math.ceil(g.m / r) - (n - 1)
    f_adv, ranks = local_search_colouring(g, r, seed=seed, starts=starts, max_rounds=rounds)
    target = 0.9 * d * n / (2 * r)
    return {
        "seed": seed,
        "m": g.m,
        "simple_regular": simple_regular,
        "kappa": kappa,
        "even_value": even_value,
        "even_bound": even_bound,
        "heuristic_max_rank": max(ranks),
        "heuristic_value": r * max(ranks) - (n - 1),
        "heuristic_ranks": list(ranks),
        "target_rank": target,
        "label": "heuristic upper bound",
    }


def _rrg(cfg: ExperimentConfig, workers: int) -> tuple[list, dict]:
    n = int(cfg.params.get("n", 40))
    d = int(cfg.params.get("d", 3))
    starts = cfg.budget("starts", 4)
    rounds = cfg.budget("rounds", 200)
    jobs = [(n, d, cfg.r, s, starts, rounds) for s in cfg.seeds]
    items = _map(_rrg_job, jobs, workers)
    ok = [it for it in items if it["status"] == "ok"]
    summary = {
        "simple": sum(it["simple_regular"] for it in ok),
        "three_connected": sum(it["kappa"] >= 3 for it in ok),
        "even_within_bound": sum(it["even_value"] <= it["even_bound"] for it in ok),
        "heuristic_above_target": sum(it["heuristic_max_rank"] >= it["target_rank"] for it in ok),
        "min_heuristic_rank": min((it["heuristic_max_rank"] for it in ok), default=None),
        "samples": len(items),
    }
    return items, summary


def _rrg_job(args) -> dict:
    return _guard(lambda: rrg_item(*args))


def _map(fn, jobs, workers: int) -> list:
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def _scaling_item(g, layers, r: int, cap: int, budget: int, seed: int) -> dict:
    item: dict[str, Any] = {"n": g.n, "m": g.m}
    try:
        res = exact_separation_number(g, r, cap=cap)
        item["s_r"] = res.s
    except BudgetError as exc:
        item["s_r"] = None
        item["s_r_status"] = str(exc)
    item["layered_separator"] = layered_separator(g, layers, r).size
    try:
        rep = exact_tree_discrepancy(g, r, budget=budget, seed=seed)
        item["discrepancy"] = rep.value
        item["discrepancy_kind"] = "exact"
    except BudgetError:
        _, ranks = local_search_colouring(g, r, seed=seed)
        item["discrepancy"] = r * max(ranks) - (g.n - 1)
        item["discrepancy_kind"] = "heuristic upper bound"
    return item


def _grid(cfg: ExperimentConfig, workers: int) -> tuple[list, dict]:
    d = int(cfg.params.get("d", 2))
    ks = [int(k) for k in cfg.params.get("ks", [3, 4, 5])]
    plus = bool(cfg.params.get("plus", False))
    cap = cfg.budget("separation_cap", 25)
    budget = cfg.budget("nodes", 2_000_000)
    items = []
    for k in ks:
        g = gen_grid(k, d, plus=plus)
        item = _guard(lambda: _scaling_item(g, grid_layers(k, d), cfg.r, cap, budget, cfg.seeds[0]))
        item.update({"k": k, "d": d, "reference": k ** (d - 1)})
        items.append(item)
    s_vals = [it.get("s_r") for it in items]
    summary = {
        "s_r": s_vals,
        "s_r_nondecreasing": all(
            a is not None and b is not None and a <= b for a, b in zip(s_vals, s_vals[1:])
        ),
        "discrepancy": [it.get("discrepancy") for it in items],
    }
    return items, summary


def _hypercube(cfg: ExperimentConfig, workers: int) -> tuple[list, dict]:
    ds = [int(d) for d in cfg.params.get("ds", [2, 3, 4])]
    cap = cfg.budget("separation_cap", 16)
    budget = cfg.budget("nodes", 2_000_000)
    items = []
    for d in ds:
        g, layers = gen_hypercube(d)
        item = _guard(lambda: _scaling_item(g, layers, cfg.r, cap, budget, cfg.seeds[0]))
        item.update({"d": d, "reference": 2**d / math.sqrt(d)})
        items.append(item)
    return items, {"s_r": [it.get("s_r") for it in items]}


def eq1_item(g, r: int, budget: int) -> dict:
    rep = exact_tree_discrepancy(g, r, budget=budget)
    sep = exact_separation_number(g, r, cap=max(16, g.n))
    rhs = (r - 1) * (sep.s - 1)
    return {"n": g.n, "edges": [list(e) for e in g.edges], "discrepancy": rep.value,
            "s_r": sep.s, "rhs": rhs, "holds": rep.value <= rhs}


def _eq1(cfg: ExperimentConfig, workers: int) -> tuple[list, dict]:
    nmax = int(cfg.params.get("nmax", 6))
    nmin = int(cfg.params.get("nmin", 2))
    rs = [int(r) for r in cfg.params.get("rs", [cfg.r])]
    budget = cfg.budget("nodes", 10**7)
    jobs = [(g, r, budget) for r in rs for n in range(nmin, nmax + 1) for g in small_connected_graphs(n)]
    items = _map(_eq1_job, jobs, workers)
    for item, (_, r, _) in zip(items, jobs):
        item["r"] = r
    summary = {
        "instances": len(items),
        "violations": sum(1 for it in items if it["status"] == "ok" and not it["holds"]),
        "incomplete": sum(1 for it in items if it["status"] != "ok"),
    }
    return items, summary


def _eq1_job(args) -> dict:
    return _guard(lambda: eq1_item(*args))


def _phi(cfg: ExperimentConfig, workers: int) -> tuple[list, dict]:
    ns = [int(n) for n in cfg.params.get("ns", [3, 4, 5, 6])]
    rs = [int(r) for r in cfg.params.get("rs", [2, 3])]
    budget = cfg.budget("nodes", 10**7)
    items = []
    for r in rs:
        for n in ns:
            def one(r=r, n=n):
                probe = phi_tightness_probe(r, n, budget=budget)
                cover = phi_exact(r, n).cover
                return {"phi": probe.phi, "min_max_rank": probe.min_max_rank,
                        "holds": probe.holds, "cover": [list(a) for a in cover]}
            item = _guard(one)
            item.update({"r": r, "n": n})
            items.append(item)
    return items, {"all_hold": all(it.get("holds") for it in items if it["status"] == "ok")}


_RUNNERS = {
    "rrg-discrepancy": _rrg,
    "grid-scaling": _grid,
    "hypercube-scaling": _hypercube,
    "eq1-suite": _eq1,
    "phi-tightness": _phi,
}


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> dict:
    """Run ``cfg`` and return the report; also written to ``cfg.output`` if set."""
    cfg.validate()
    items, summary = _RUNNERS[cfg.experiment](cfg, workers)
    report = {
        "version": version_string(),
        "config": cfg.to_json(),
        "items": items,
        "summary": summary,
    }
    if cfg.output:
        Path(cfg.output).write_text(dumps(report))
    return report
