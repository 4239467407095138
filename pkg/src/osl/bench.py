"""Scaling and ablation harness.

Only wall-clock values vary between runs with the same seed; node choices,
weights, affected counts and closure sizes are fully determined by the seed.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from . import _kernels
from .belief_base import BeliefBase, Literal
from .errors import InsufficientData
from .generators import SHAPES, component_spec
from .manager import assert_belief
from .poset import build_lattice
from .product import OslCarrier
from .propagation import propagate

# (observers, situations) pairs of the reference scaling table, n <= 1980
STANDARD_SIZES = [(3, 3), (4, 4), (5, 6), (7, 8), (10, 10), (13, 14), (18, 18),
               (24, 25), (33, 33), (44, 45)]

CSV_COLUMNS = ["size", "n_obs", "n_sit", "trial", "time_us", "affected", "upclosure"]


@dataclass
class BenchConfig:
    sizes: list[tuple[int, int]] = field(default_factory=lambda: list(STANDARD_SIZES))
    trials: int = 30
    seed: int = 42
    warmup: int = 5
    insert_count: int | None = None  # None: n // 2 preloaded records per trial
    shape: str = "chain"
    atoms: int = 4

    def __post_init__(self):
        if self.trials < 2:
            raise ValueError("trials must be >= 2")
        if not self.sizes:
            raise ValueError("sizes must be non-empty")
        if self.warmup < 0:
            raise ValueError("warmup must be >= 0")


@dataclass
class TrialRecord:
    lattice_size: int
    n_obs: int
    n_sit: int
    trial_index: int
    time_us: float
    affected_count: int
    upclosure_size: int
    visits: int

    def csv_row(self) -> list:
        return [self.lattice_size, self.n_obs, self.n_sit, self.trial_index,
                f"{self.time_us:.3f}", self.affected_count, self.upclosure_size]


@dataclass
class FitReport:
    slope: float
    intercept: float
    r_squared: float
    slope_ci: tuple[float, float]
    slope_stderr: float
    n_points: int


def balance_factor(n_obs: int, n_sit: int) -> float:
    return max(n_obs, n_sit) / min(n_obs, n_sit)


def gen_balanced_carrier(n_obs: int, n_sit: int, shape: str = "chain", seed: int = 0) -> OslCarrier:
    """Product of two generated components; deterministic in all arguments.

    The built-in shapes are fixed, so ``seed`` is accepted for interface
    stability and does not change the result.
    """
    if n_obs < 1 or n_sit < 1:
        raise ValueError("component sizes must be >= 1")
    obs = build_lattice(component_spec(n_obs, shape, "o"))
    sit = build_lattice(component_spec(n_sit, shape, "s"))
    return OslCarrier(obs, sit)


def _size_rng(seed: int, n_obs: int, n_sit: int) -> np.random.Generator:
    return np.random.default_rng([seed, n_obs, n_sit])


def run_rbp_scaling(cfg: BenchConfig, kernels=None) -> list[TrialRecord]:
    """Time a single propagation per trial on a freshly preloaded base.

    Per trial: preload random records (uniform node, uniform weight, literal
    from a small pool), insert one more record at a uniform node, and time
    only its propagation. Warm-up trials are run and dropped.
    """
    k = kernels or _kernels.active
    pool = [Literal(f"p{i}") for i in range(max(1, cfg.atoms))]
    out: list[TrialRecord] = []
    for n_obs, n_sit in cfg.sizes:
        carrier = gen_balanced_carrier(n_obs, n_sit, cfg.shape, cfg.seed)
        n = carrier.n
        preload = cfg.insert_count if cfg.insert_count is not None else max(1, n // 2)
        rng = _size_rng(cfg.seed, n_obs, n_sit)
        for t in range(cfg.warmup + cfg.trials):
            base = BeliefBase(carrier)
            lits = rng.integers(0, len(pool), preload)
            nodes = rng.integers(0, n, preload)
            weights = rng.random(preload)
            for li, e, w in zip(lits.tolist(), nodes.tolist(), weights.tolist()):
                propagate(base, base.insert_raw(pool[li], e, w), kernels=k)
            lit = pool[int(rng.integers(0, len(pool)))]
            node = int(rng.integers(0, n))
            record = base.insert_raw(lit, node, float(rng.random()))
            t0 = time.perf_counter_ns()
            affected = propagate(base, record, kernels=k)
            elapsed = time.perf_counter_ns() - t0
            if t < cfg.warmup:
                continue
            out.append(TrialRecord(n, n_obs, n_sit, t - cfg.warmup, max(elapsed, 1) / 1000.0,
                                   len(affected), carrier.upclosure_size(node), affected.visited))
    return out


def fit_powerlaw(records: Iterable[TrialRecord]) -> FitReport:
    """OLS of per-size mean log-time on log-size, with a 95% slope interval."""
    by_size: dict[int, list[float]] = {}
    for r in records:
        by_size.setdefault(r.lattice_size, []).append(math.log(r.time_us))
    sizes = sorted(by_size)
    return fit_loglog(sizes, [math.exp(np.mean(by_size[s])) for s in sizes])


def fit_loglog(sizes: Sequence[float], times: Sequence[float]) -> FitReport:
    if len(set(sizes)) < 3:
        raise InsufficientData("a power-law fit needs at least 3 distinct sizes")
    x = np.log(np.asarray(sizes, dtype=np.float64))
    y = np.log(np.asarray(times, dtype=np.float64))
    res = stats.linregress(x, y)
    dof = len(x) - 2
    if dof > 0 and np.isfinite(res.stderr):
        half = float(stats.t.ppf(0.975, dof) * res.stderr)
    else:
        half = 0.0
    if np.ptp(y) == 0:
        r2 = 1.0  # constant data is fitted exactly by a flat line
    else:
        r2 = float(res.rvalue ** 2)
    stderr = float(res.stderr) if np.isfinite(res.stderr) else 0.0
    return FitReport(float(res.slope), float(res.intercept), r2,
                     (float(res.slope) - half, float(res.slope) + half), stderr, len(x))


def size_summary(records: Iterable[TrialRecord]) -> list[dict]:
    by_size: dict[tuple, list[TrialRecord]] = {}
    for r in records:
        by_size.setdefault((r.lattice_size, r.n_obs, r.n_sit), []).append(r)
    rows = []
    for (n, no, ns), rs in sorted(by_size.items()):
        times = np.array([r.time_us for r in rs])
        aff = np.array([r.affected_count for r in rs])
        mean = float(times.mean())
        std = float(times.std(ddof=1)) if len(rs) > 1 else 0.0
        rows.append({
            "size": n, "n_obs": no, "n_sit": ns, "kappa": round(balance_factor(no, ns), 2),
            "trials": len(rs), "mean_time_us": mean, "std_time_us": std,
            "affected_mean": float(aff.mean()), "affected_std": float(aff.std(ddof=1)) if len(rs) > 1 else 0.0,
            "affected_max": int(aff.max()), "unstable": bool(std > 3 * mean),
        })
    return rows


def write_csv(records: Iterable[TrialRecord], dest):
    """``dest`` is a path or an open text stream."""
    if hasattr(dest, "write"):
        w = csv.writer(dest, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow(r.csv_row())
        return
    with open(dest, "w", newline="") as fh:
        write_csv(records, fh)


def summary_dict(cfg: BenchConfig, records: list[TrialRecord], backend: str) -> dict:
    out = {"config": {**asdict(cfg), "sizes": [list(s) for s in cfg.sizes]},
           "backend": backend, "sizes": size_summary(records)}
    try:
        fit = fit_powerlaw(records)
        out["fit"] = {**asdict(fit), "slope_ci": list(fit.slope_ci)}
    except InsufficientData as exc:
        out["fit"] = {"error": str(exc)}
    return out


# -- ablation -----------------------------------------------------------------

ABLATION_CONFIGS = ("full", "no-mcc", "no-propagation")


@dataclass
class AblationConfig:
    n_obs: int = 8
    n_sit: int = 8
    shape: str = "chain"
    asserts: int = 200
    atoms: int = 6
    contradiction_rate: float = 0.2
    probes: int = 200
    repeats: int = 3
    seed: int = 42


def ablation_workload(cfg: AblationConfig, carrier: OslCarrier):
    """Asserts on lower nodes, probes on the remaining nodes.

    Insert nodes are drawn from the bottom halves of both components and probe
    nodes are every other node, so no probe sits exactly on an insertion node.
    """
    rng = np.random.default_rng(cfg.seed)
    half_o = max(1, (carrier.n_obs + 1) // 2)
    half_s = max(1, (carrier.n_sit + 1) // 2)
    low = [carrier.node(o, s) for o in range(half_o) for s in range(half_s)]
    lows = set(low)
    if carrier.n_obs > 1 and carrier.n_sit > 1:
        # keep inserts strictly below the probe region
        low = [carrier.node(o, s) for o in range(half_o) for s in range(half_s)
               if o < carrier.n_obs - 1 and s < carrier.n_sit - 1] or low
        lows = set(low)
    probe_nodes = [e for e in range(carrier.n) if e not in lows]
    steps = []
    for _ in range(cfg.asserts):
        atom = f"q{int(rng.integers(0, cfg.atoms))}"
        neg = bool(rng.random() < cfg.contradiction_rate)
        steps.append((Literal(atom, neg), int(rng.choice(low)), float(rng.uniform(0.05, 1.0))))
    return steps, probe_nodes, rng


def run_ablation(cfg: AblationConfig | None = None) -> list[dict]:
    """Same workload under full / no-mcc / no-propagation.

    Coverage is the share of probe queries (literal, node) that have positive
    credibility by the brute-force definition over that run's live records
    and that the engine also answers with positive credibility.
    """
    from .oracle import cred_table_brute

    cfg = cfg or AblationConfig()
    carrier = gen_balanced_carrier(cfg.n_obs, cfg.n_sit, cfg.shape, cfg.seed)
    steps, probe_nodes, rng = ablation_workload(cfg, carrier)
    flags = {"full": (True, True), "no-mcc": (False, True), "no-propagation": (True, False)}
    rows = []
    for name in ABLATION_CONFIGS:
        detect, prop = flags[name]
        best = math.inf
        for _ in range(cfg.repeats):
            base = BeliefBase(carrier)
            t0 = time.perf_counter_ns()
            for lit, node, w in steps:
                assert_belief(base, lit, node, w, detect=detect, propagate_update=prop)
            best = min(best, (time.perf_counter_ns() - t0) / 1e6)
        truth = cred_table_brute(base.records(), carrier)
        candidates = [(lit, e) for lit, row in sorted(truth.items()) for e in probe_nodes if row[e] > 0]
        prng = np.random.default_rng(cfg.seed + 1)
        if candidates:
            pick = prng.choice(len(candidates), size=min(cfg.probes, len(candidates)), replace=False)
            probes = [candidates[i] for i in sorted(pick.tolist())]
            hits = sum(1 for lit, e in probes if base.cred(lit, e) > 0)
            coverage = hits / len(probes)
        else:
            probes, coverage = [], float("nan")
        rows.append({"config": name, "runtime_ms": best, "coverage": coverage,
                     "belief_count": len(base.cache), "records": len(base),
                     "probes": len(probes)})
    return rows


def run_mcc_scaling(sizes: Sequence[int] = (250, 500, 1000, 2000, 4000), n_side: int = 20,
                    atoms: int = 50, contradiction_rate: float = 0.1, seed: int = 42) -> dict:
    """Informational: wall time of a global decomposition against base size."""
    from .contradiction import mcc

    carrier = gen_balanced_carrier(n_side, n_side, "chain", seed)
    rng = np.random.default_rng(seed)
    times = []
    for b in sizes:
        base = BeliefBase(carrier)
        for _ in range(b):
            lit = Literal(f"a{int(rng.integers(0, atoms))}", bool(rng.random() < contradiction_rate))
            base.insert_raw(lit, int(rng.integers(0, carrier.n)), float(rng.random()))
        mcc(base)  # compile / warm
        t0 = time.perf_counter_ns()
        mcc(base)
        times.append((time.perf_counter_ns() - t0) / 1000.0)
    fit = fit_loglog(list(sizes), times)
    return {"sizes": list(sizes), "time_us": times, "slope": fit.slope, "r_squared": fit.r_squared}


def compare_backends(cfg: BenchConfig) -> dict:
    """Run the scaling study under each available kernel backend."""
    out = {}
    for ks in (_kernels.numba_kernels, _kernels.numpy_kernels):
        if ks is None:
            continue
        recs = run_rbp_scaling(cfg, kernels=ks)
        out[ks.name] = summary_dict(cfg, recs, ks.name)
    return out


__all__ = ["BenchConfig", "TrialRecord", "FitReport", "AblationConfig", "STANDARD_SIZES",
           "SHAPES", "gen_balanced_carrier", "balance_factor", "run_rbp_scaling",
           "fit_powerlaw", "fit_loglog", "run_ablation", "run_mcc_scaling", "compare_backends",
           "write_csv", "summary_dict", "size_summary"]
