"""Experiment orchestration: cells, regret accounting, invariant checks, IO.

An experiment is a grid of (T, seed) cells for one algorithm. Every cell is
reproducible in isolation: its random streams are derived from (seed, T)
labels alone, never from scheduling order, so serial and thread-pool
execution emit byte-identical output. Timing is off by default for the
same reason; wall_ms is reported as 0 unless explicitly requested.
"""

from __future__ import annotations

import json
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .. import baselines, ofw_bandit, ofw_full
from ..geometry import FeasibleSet, excess_rows, from_config, to_config
from ..losses import AdversarySpec, LossSequence, generate_sequence
from ..ofw_full import RunTrace
from ..rng import Rng

CSV_HEADER = (
    "algo,set,dim,T,seed,regret,regret_norm_T23,lmo_calls,projections,"
    "bound_regret,bound_lmo,wall_ms"
)

ALGOS = ("ofw", "ofw-bandit", "ogd", "rftl")


@dataclass(frozen=True)
class ExperimentSpec:
    algo: str
    set_config: dict
    Ts: tuple
    seeds: tuple
    adversary: AdversarySpec
    alpha: float = 1.0
    b: Optional[float] = None
    T0: Optional[float] = None
    delta: Optional[float] = None
    K: Optional[int] = None
    c: Optional[float] = None
    alternate_b: bool = False
    verify: bool = False
    solver_thread: bool = False
    timing: bool = False
    threads: int = 1
    keep_artifacts: bool = False
    out: Optional[str] = None
    fmt: str = "csv"


@dataclass
class CellRow:
    algo: str
    set: str
    dim: int
    T: int
    seed: int
    regret: float
    regret_norm_T23: float
    lmo_calls: int
    projections: int
    bound_regret: Optional[float]
    bound_lmo: Optional[float]
    wall_ms: float


@dataclass
class CheckResult:
    name: str
    passed: bool
    margin: float  # observed minus allowed; negative is slack
    location: str = ""


@dataclass
class VerifyReport:
    algo: str
    T: int
    seed: int
    checks: list

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


@dataclass
class CellArtifacts:
    algo: str
    T: int
    seed: int
    set_: FeasibleSet
    losses: LossSequence
    trace: RunTrace
    config: object
    x1: np.ndarray
    records: Optional[list] = None
    bound_regret: Optional[float] = None
    bound_lmo: Optional[float] = None


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    rows: list
    reports: dict = field(default_factory=dict)  # (T, seed) -> VerifyReport
    errors: dict = field(default_factory=dict)  # (T, seed) -> str
    artifacts: dict = field(default_factory=dict)
    threads_used: int = 1

    def csv_text(self) -> str:
        return to_csv(self.rows)

    def json_text(self) -> str:
        return to_json(self.rows)


@dataclass
class SlopeFit:
    exponent: float
    intercept: float
    r2: float


def compute_regret(trace: RunTrace, losses: LossSequence, set_: FeasibleSet) -> float:
    """Total loss of the recorded plays minus the best fixed point's total."""
    if len(trace) != len(losses):
        raise ValueError("trace length does not match the loss sequence")
    total = float(losses.values_at(trace.plays).sum())
    _, best = baselines.best_in_hindsight(losses, set_)
    return total - best


def fit_slope(Ts, regrets) -> SlopeFit:
    """Least-squares slope of log regret against log T; needs 4 clean points."""
    Ts = np.asarray(Ts, dtype=np.float64)
    regrets = np.asarray(regrets, dtype=np.float64)
    keep = regrets > 0
    if not np.all(keep):
        warnings.warn(
            f"dropping {int((~keep).sum())} nonpositive regret value(s) from the fit",
            stacklevel=2,
        )
    Ts, regrets = Ts[keep], regrets[keep]
    if len(Ts) < 4:
        raise ValueError("need at least 4 positive points for a slope fit")
    x, y = np.log(Ts), np.log(regrets)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float((resid**2).sum()) / ss_tot
    return SlopeFit(exponent=float(slope), intercept=float(intercept), r2=r2)


def _rng_for_cell(seed: int, T: int) -> Rng:
    return Rng(seed).substream(f"T={T}")


def run_cell(spec: ExperimentSpec, T: int, seed: int):
    set_ = from_config(spec.set_config)
    n = set_.n
    root = _rng_for_cell(seed, T)
    adv_rng = root.substream(f"adversary/{spec.adversary.seed_offset}")
    losses = generate_sequence(spec.adversary, T, n, set_, adv_rng)
    G, M = losses.bounds.G, losses.bounds.M
    R, r = set_.outer_radius, set_.inner_radius
    alpha = spec.alpha
    records = None
    bound_lmo: Optional[float] = None

    start = time.perf_counter() if spec.timing else None
    if spec.algo == "ofw":
        b_auto, T0_auto = ofw_full.gap_schedule(G, R, alpha, alternate_b=spec.alternate_b)
        config = ofw_full.OfwConfig(
            alpha=alpha,
            T0=T0_auto if spec.T0 is None else spec.T0,
            b=b_auto if spec.b is None else spec.b,
        )
        trace = ofw_full.run(losses, set_, config, record_subopt=spec.verify)
        bound_regret = ofw_full.regret_bound(G, R, alpha, T)
        bound_lmo = float(T)
    elif spec.algo == "ogd":
        config = None
        trace = baselines.ogd_run(losses, set_, alpha)
        bound_regret = baselines.ogd_regret_bound(G, alpha, T)
    elif spec.algo == "rftl":
        _, T0_auto = ofw_full.gap_schedule(G, R, alpha)
        T0 = T0_auto if spec.T0 is None else spec.T0
        config = ofw_full.OfwConfig(alpha=alpha, T0=T0, b=0.0)
        trace = baselines.rftl_exact_run(losses, set_, alpha, T0)
        bound_regret = None
    elif spec.algo == "ofw-bandit":
        config = ofw_bandit.bandit_params(n, M, G, R, r, alpha, T, c=spec.c)
        config = ofw_bandit.with_overrides(config, delta=spec.delta, K=spec.K, T0=spec.T0)
        trace, records = ofw_bandit.run(
            losses, set_, config, root.substream("algo"), solver_thread=spec.solver_thread
        )
        bound_regret, bound_lmo = ofw_bandit.bandit_bounds(config, losses.bounds, r, R)
    else:
        raise ValueError(f"unknown algo {spec.algo!r}")
    wall_ms = (time.perf_counter() - start) * 1e3 if spec.timing else 0.0

    regret = compute_regret(trace, losses, set_)
    row = CellRow(
        algo=spec.algo,
        set=set_.kind,
        dim=n,
        T=T,
        seed=seed,
        regret=regret,
        regret_norm_T23=regret / float(T) ** (2.0 / 3.0),
        lmo_calls=trace.lmo_calls,
        projections=trace.projections,
        bound_regret=bound_regret,
        bound_lmo=bound_lmo,
        wall_ms=wall_ms,
    )
    art = CellArtifacts(
        algo=spec.algo,
        T=T,
        seed=seed,
        set_=set_,
        losses=losses,
        trace=trace,
        config=config,
        x1=np.zeros(n),
        records=records,
        bound_regret=bound_regret,
        bound_lmo=bound_lmo,
    )
    report = verify_invariants(art) if spec.verify else None
    return row, report, art


def verify_invariants(art: CellArtifacts) -> VerifyReport:
    """Recheck the learner's per-step guarantees from the raw artifacts.

    Everything is reconstructed from the recorded plays and the loss
    sequence, so a corrupted trace fails the relevant check at the
    offending round or block.
    """
    checks: list = []
    trace, set_, losses = art.trace, art.set_, art.losses
    T = len(trace)
    feas = float(excess_rows(set_, trace.plays).max())
    checks.append(
        CheckResult("feasible-plays", feas <= 1e-9, feas - 1e-9, f"worst excess {feas:.3g}")
    )
    regret = compute_regret(trace, losses, set_)

    if art.algo == "ofw":
        checks.append(
            CheckResult("lmo-count", trace.lmo_calls == T, float(trace.lmo_calls - T))
        )
        config = art.config
        subopt, _ = ofw_full.reconstruct_leader(
            trace.plays, losses, set_, config.alpha, config.T0, art.x1
        )
        t = np.arange(1, T + 1, dtype=np.float64)
        eps = config.b * config.alpha * (t + config.T0) ** (1.0 / 3.0)
        margins = subopt - eps
        worst = int(np.argmax(margins))
        checks.append(
            CheckResult(
                "per-round-gap",
                bool(margins[worst] <= 1e-6),
                float(margins[worst] - 1e-6),
                f"round {worst + 1}",
            )
        )
        checks.append(
            CheckResult(
                "regret-bound", regret <= art.bound_regret, regret - art.bound_regret
            )
        )
    elif art.algo == "ogd":
        checks.append(
            CheckResult("projection-count", trace.projections == T, float(trace.projections - T))
        )
        allowed = 2.0 * art.bound_regret  # classical bound with 2x slack
        checks.append(CheckResult("regret-bound-2x", regret <= allowed, regret - allowed))
    elif art.algo == "rftl":
        checks.append(
            CheckResult("projection-count", trace.projections == T, float(trace.projections - T))
        )
        config = art.config
        subopt, _ = ofw_full.reconstruct_leader(
            trace.plays, losses, set_, config.alpha, config.T0, art.x1
        )
        worst = int(np.argmax(subopt))
        checks.append(
            CheckResult(
                "leader-gap-zero",
                bool(subopt[worst] <= 1e-9),
                float(subopt[worst] - 1e-9),
                f"round {worst + 1}",
            )
        )
    elif art.algo == "ofw-bandit":
        rows = ofw_bandit.verify_block_certificates(art.records, art.config, set_)
        if rows:
            cert = np.array([row["gap"] - row["epsilon"] for row in rows])
            worst = int(np.argmax(cert))
            checks.append(
                CheckResult(
                    "block-certificate",
                    bool(cert[worst] <= 1e-6),
                    float(cert[worst] - 1e-6),
                    f"block {rows[worst]['m']}",
                )
            )
            caps = np.array(
                [row["iterations"] - max(row["iteration_cap"], 1.0) for row in rows]
            )
            worst = int(np.argmax(caps))
            checks.append(
                CheckResult(
                    "block-iteration-cap",
                    bool(caps[worst] <= 0),
                    float(caps[worst]),
                    f"block {rows[worst]['m']}",
                )
            )
        checks.append(
            CheckResult(
                "lmo-bound",
                trace.lmo_calls <= art.bound_lmo,
                trace.lmo_calls - art.bound_lmo,
            )
        )
    return VerifyReport(algo=art.algo, T=T, seed=art.seed, checks=checks)


def _resolve_threads(spec: ExperimentSpec) -> int:
    env = os.environ.get("PFOL_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return max(1, int(spec.threads))


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Execute every (T, seed) cell, serially or on a thread pool.

    Cell failures are recorded in result.errors and the remaining cells
    proceed. Output files are written only after all cells finish, in the
    declared cell order.
    """
    if spec.algo not in ALGOS:
        raise ValueError(f"unknown algo {spec.algo!r}; expected one of {ALGOS}")
    cells = [(T, seed) for T in spec.Ts for seed in spec.seeds]
    threads = _resolve_threads(spec)
    result = ExperimentResult(spec=spec, rows=[], threads_used=threads)
    slots: list = [None] * len(cells)

    def work(i: int):
        T, seed = cells[i]
        try:
            slots[i] = ("ok", run_cell(spec, T, seed))
        except Exception as exc:  # cell isolation: record and continue
            slots[i] = ("err", f"{type(exc).__name__}: {exc}")

    if threads == 1:
        for i in range(len(cells)):
            work(i)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(len(cells))))

    for i, (T, seed) in enumerate(cells):
        status, payload = slots[i]
        if status == "err":
            result.errors[(T, seed)] = payload
            continue
        row, report, art = payload
        result.rows.append(row)
        if report is not None:
            result.reports[(T, seed)] = report
        if spec.keep_artifacts:
            result.artifacts[(T, seed)] = art

    if spec.out:
        text = result.json_text() if spec.fmt == "json" else result.csv_text()
        with open(spec.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return result


def _fmt_field(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


_COLUMNS = CSV_HEADER.split(",")


def to_csv(rows) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(",".join(_fmt_field(getattr(row, col)) for col in _COLUMNS))
    return "\n".join(lines) + "\n"


def to_json(rows) -> str:
    payload = [{col: getattr(row, col) for col in _COLUMNS} for row in rows]
    return json.dumps(payload, indent=2) + "\n"


def rows_from_json(text: str) -> list:
    out = []
    for rec in json.loads(text):
        out.append(CellRow(**{col: rec[col] for col in _COLUMNS}))
    return out
