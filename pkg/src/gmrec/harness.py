"""Monte-Carlo trial runner, error metrics, and sample-complexity sweeps.

A trial draws (graph, weights, B, Z) from seeded streams keyed by
(seed, n, m, trial), runs the configured recovery scheme, and judges the
estimate on two criteria: exact support recovery at a magnitude threshold
(default 1e-5) and normalized Frobenius error ||X - Y||_F / n^2 below a
threshold (default 1e-6 noiseless, 1e-4 noisy). Scheme-declared errors
(consistency failure, solver failure) count against both criteria.

Sweep CSVs are byte-deterministic for a fixed seed; wall-clock timing is
therefore opt-in (the runtime column reads 0 unless requested).
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

import numpy as np

from .bounds import default_noise_radius
from .ensembles import EnsembleSpec, sample
from .errors import ConfigError, GmrecError
from .graphs import Field, build_graph_matrix, support, write_matrix_csv
from .measurement import MeasurementSet, load_measurements, sample_generator, synthesize
from .recovery import RecoveryConfig, RecoveryResult, RecoveryStatus, recover
from .rng import stream


@dataclass(frozen=True)
class Metrics:
    topo_ok: bool
    sign_ok: bool
    frob: float
    frob_normalized: float


def metrics(X: np.ndarray, Y: np.ndarray, support_threshold: float = 1e-5) -> Metrics:
    """Topology, sign, and Frobenius agreement between estimate and truth."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    if X.shape != Y.shape or X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ConfigError(f"metrics needs matching square matrices, got {X.shape} vs {Y.shape}")
    n = X.shape[0]
    gx = support(X, support_threshold)
    gy = support(Y, support_threshold)
    topo_ok = gx.edges == gy.edges
    if np.iscomplexobj(X) or np.iscomplexobj(Y):
        sign_ok = topo_ok
    else:
        # Real mode: sign agreement off-diagonal, entries below threshold as zero.
        sx = np.where(np.abs(X) >= support_threshold, np.sign(X), 0.0)
        sy = np.where(np.abs(Y) >= support_threshold, np.sign(Y), 0.0)
        off = ~np.eye(n, dtype=bool)
        sign_ok = bool(np.array_equal(sx[off], sy[off]))
    frob = float(np.linalg.norm(X - Y))
    return Metrics(topo_ok=topo_ok, sign_ok=sign_ok, frob=frob, frob_normalized=frob / n**2)


@dataclass(frozen=True)
class TrialSpec:
    """One Monte-Carlo configuration; None fields resolve from the noise level."""

    ensemble: EnsembleSpec
    m: int
    field_tag: Field = Field.COMPLEX
    sigma_S: float = 1.0
    sigma_N: float = 0.0
    recovery: RecoveryConfig = field(default_factory=RecoveryConfig)
    trials: int = 20
    seed: int = 0
    topo_threshold: float = 1e-5
    param_threshold: float | None = None
    gamma: float | None = None
    b_mean_re: float | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.m < 1:
            raise ConfigError("m must be >= 1")
        if self.topo_threshold <= 0:
            raise ConfigError("topology threshold must be positive")

    def resolved_param_threshold(self) -> float:
        if self.param_threshold is not None:
            return self.param_threshold
        return 1e-6 if self.sigma_N == 0 else 1e-4

    def resolved_gamma(self, n: int) -> float:
        if self.gamma is not None:
            return self.gamma
        return 0.0 if self.sigma_N == 0 else default_noise_radius(n, self.sigma_N)

    def resolved_mean_re(self) -> float:
        if self.b_mean_re is not None:
            return self.b_mean_re
        return 1.0 if self.field_tag is Field.COMPLEX else 0.0


@dataclass(frozen=True)
class TrialOutcome:
    topo_ok: bool
    param_ok: bool
    sign_ok: bool
    frob_normalized: float
    status: str
    runtime_s: float
    solver_iterations: int

    @property
    def success(self) -> bool:
        return self.topo_ok and self.param_ok


@dataclass
class TrialStats:
    eps_T_hat: float
    eps_P_hat: float
    eps_T_ci: float
    eps_P_ci: float
    mean_frob_normalized: float
    mean_runtime_s: float
    trials: int
    outcomes: list[TrialOutcome]

    @property
    def success_fraction(self) -> float:
        return sum(1 for o in self.outcomes if o.success) / len(self.outcomes)


def _ci_half(p_hat: float, trials: int) -> float:
    return 1.96 * math.sqrt(p_hat * (1.0 - p_hat) / trials)


def _materialize(spec: TrialSpec, n: int, m: int, t: int):
    """Draw (Y, ms, cfg) for trial t from independent seeded streams."""
    ens = spec.ensemble if spec.ensemble.n == n else replace(spec.ensemble, n=n)
    rng_g = stream(spec.seed, n, m, t, 0)
    g = sample(ens, rng_g)
    Y = build_graph_matrix(g, rng_g, field_tag=spec.field_tag)
    rng_b = stream(spec.seed, n, m, t, 1)
    B = sample_generator(m, n, spec.field_tag, spec.sigma_S, rng_b, mean_re=spec.resolved_mean_re())
    rng_z = stream(spec.seed, n, m, t, 2)
    ms = synthesize(B, Y, spec.sigma_N, rng_z, sigma_S=spec.sigma_S)
    cfg_seed = int(stream(spec.seed, n, m, t, 3).integers(2**62))
    cfg = replace(spec.recovery, gamma=spec.resolved_gamma(n), seed=cfg_seed)
    return Y, ms, cfg


def _judge(spec: TrialSpec, Y, result: RecoveryResult) -> TrialOutcome:
    met = metrics(result.X, Y.values, spec.topo_threshold)
    declared_ok = result.status is RecoveryStatus.SUCCESS
    return TrialOutcome(
        topo_ok=declared_ok and met.topo_ok,
        param_ok=declared_ok and met.frob_normalized <= spec.resolved_param_threshold(),
        sign_ok=declared_ok and met.sign_ok,
        frob_normalized=met.frob_normalized,
        status=result.status.value,
        runtime_s=result.runtime_s,
        solver_iterations=result.solver_iterations,
    )


def _run_single_trial(spec: TrialSpec, n: int, m: int, t: int) -> TrialOutcome:
    t0 = time.perf_counter()
    try:
        Y, ms, cfg = _materialize(spec, n, m, t)
        result = recover(ms, cfg)
        return _judge(spec, Y, result)
    except GmrecError:
        return TrialOutcome(
            topo_ok=False, param_ok=False, sign_ok=False,
            frob_normalized=float("inf"), status="error",
            runtime_s=time.perf_counter() - t0, solver_iterations=0,
        )


def run_trials(spec: TrialSpec, n: int | None = None, m: int | None = None) -> TrialStats:
    """Independent trials of (sample graph, synthesize, recover, judge)."""
    n = spec.ensemble.n if n is None else n
    m = spec.m if m is None else m
    indices = range(spec.trials)
    if spec.jobs > 1:
        with ThreadPoolExecutor(max_workers=spec.jobs) as pool:
            outcomes = list(pool.map(lambda t: _run_single_trial(spec, n, m, t), indices))
    else:
        outcomes = [_run_single_trial(spec, n, m, t) for t in indices]
    eps_t = sum(1 for o in outcomes if not o.topo_ok) / spec.trials
    eps_p = sum(1 for o in outcomes if not o.param_ok) / spec.trials
    finite = [o.frob_normalized for o in outcomes if math.isfinite(o.frob_normalized)]
    return TrialStats(
        eps_T_hat=eps_t,
        eps_P_hat=eps_p,
        eps_T_ci=_ci_half(eps_t, spec.trials),
        eps_P_ci=_ci_half(eps_p, spec.trials),
        mean_frob_normalized=float(np.mean(finite)) if finite else float("inf"),
        mean_runtime_s=float(np.mean([o.runtime_s for o in outcomes])),
        trials=spec.trials,
        outcomes=outcomes,
    )


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanUp:
    """Increment m until the joint success fraction reaches q."""

    q: float = 0.9
    m_start: int = 1
    m_max: int | None = None

    def __post_init__(self):
        if not (0.0 < self.q <= 1.0):
            raise ConfigError("q must lie in (0, 1]")
        if self.m_start < 1:
            raise ConfigError("m_start must be >= 1")


@dataclass(frozen=True)
class Grid:
    m_values: tuple[int, ...]

    def __post_init__(self):
        if not self.m_values:
            raise ConfigError("grid strategy needs at least one m")
        object.__setattr__(self, "m_values", tuple(int(m) for m in self.m_values))


@dataclass(frozen=True)
class SweepRow:
    n: int
    m: int
    scheme: str
    topo_err: float
    param_err: float
    mean_frob: float  # normalized by n^2
    runtime_ms: float
    trials: int


@dataclass
class SweepResult:
    rows: list[SweepRow]
    minimal_m: dict[int, int | None]
    saturated: list[int]

    def row_for(self, n: int, m: int) -> SweepRow | None:
        for row in self.rows:
            if row.n == n and row.m == m:
                return row
        return None


def sample_complexity_sweep(
    base: TrialSpec, n_list: Iterable[int], strategy: ScanUp | Grid
) -> SweepResult:
    """Error-rate table over (n, m); scan-up also reports per-n minimal m."""
    n_list = [int(n) for n in n_list]
    if not n_list:
        raise ConfigError("n_list must be non-empty")
    rows: list[SweepRow] = []
    minimal: dict[int, int | None] = {}
    saturated: list[int] = []

    for n in n_list:
        if isinstance(strategy, Grid):
            m_values = [m for m in strategy.m_values if 1 <= m <= n]
        else:
            m_values = list(range(strategy.m_start, (strategy.m_max or n) + 1))
        found = None
        for m in m_values:
            stats = run_trials(base, n=n, m=m)
            rows.append(
                SweepRow(
                    n=n, m=m, scheme=base.recovery.scheme,
                    topo_err=stats.eps_T_hat, param_err=stats.eps_P_hat,
                    mean_frob=stats.mean_frob_normalized,
                    runtime_ms=stats.mean_runtime_s * 1e3,
                    trials=stats.trials,
                )
            )
            if isinstance(strategy, ScanUp) and stats.success_fraction >= strategy.q:
                found = m
                break
        if isinstance(strategy, ScanUp):
            minimal[n] = found
            if found is None:
                saturated.append(n)
    return SweepResult(rows=rows, minimal_m=minimal, saturated=saturated)


def per_trial_minimal_m(
    base: TrialSpec, n: int, m_start: int = 1, m_max: int | None = None
) -> list[int | None]:
    """Alternative averaging: each trial's own first-success m, nested B rows.

    One graph and one n x n generator matrix are drawn per trial; m grows by
    taking leading row blocks, so successive m values see nested measurements.
    """
    m_max = m_max or n
    out: list[int | None] = []
    for t in range(base.trials):
        ens = base.ensemble if base.ensemble.n == n else replace(base.ensemble, n=n)
        rng_g = stream(base.seed, n, 0, t, 0)
        g = sample(ens, rng_g)
        Y = build_graph_matrix(g, rng_g, field_tag=base.field_tag)
        rng_b = stream(base.seed, n, 0, t, 1)
        B_full = sample_generator(n, n, base.field_tag, base.sigma_S, rng_b,
                                  mean_re=base.resolved_mean_re())
        rng_z = stream(base.seed, n, 0, t, 2)
        Z_full = np.zeros((n, n), dtype=base.field_tag.dtype)
        if base.sigma_N > 0:
            Z_full = rng_z.normal(0, base.sigma_N, (n, n))
            if base.field_tag is Field.COMPLEX:
                Z_full = Z_full + 1j * rng_z.normal(0, base.sigma_N, (n, n))
        cfg_seed = int(stream(base.seed, n, 0, t, 3).integers(2**62))
        found = None
        for m in range(m_start, m_max + 1):
            ms = MeasurementSet(
                B=B_full[:m], A=B_full[:m] @ Y.values + Z_full[:m],
                field_tag=base.field_tag, sigma_S=base.sigma_S, sigma_N=base.sigma_N,
            )
            cfg = replace(base.recovery, gamma=base.resolved_gamma(n), seed=cfg_seed)
            try:
                outcome = _judge(base, Y, recover(ms, cfg))
            except GmrecError:
                continue
            if outcome.success:
                found = m
                break
        out.append(found)
    return out


# ---------------------------------------------------------------------------
# File emission / ingestion
# ---------------------------------------------------------------------------

SWEEP_HEADER = "n,m,scheme,topo_err,param_err,mean_frob,runtime_ms,trials"


def emit_sweep(result: SweepResult, path, timing: bool = False) -> None:
    """Write the sweep CSV; rows sorted by (n, m, scheme) for determinism."""
    lines = [SWEEP_HEADER]
    for row in sorted(result.rows, key=lambda r: (r.n, r.m, r.scheme)):
        runtime = repr(float(row.runtime_ms)) if timing else "0"
        lines.append(
            f"{row.n},{row.m},{row.scheme},{row.topo_err!r},{row.param_err!r},"
            f"{row.mean_frob!r},{runtime},{row.trials}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def emit_recovery(result: RecoveryResult, out_prefix) -> tuple[Path, Path]:
    """Write the estimate matrix CSV and a JSON status record."""
    import json

    raw = str(out_prefix)
    if raw.endswith(("/", "\\")):
        parent, stem = Path(raw), ""
    else:
        parent, stem = Path(raw).parent, Path(raw).name
    parent.mkdir(parents=True, exist_ok=True)
    x_path = parent / f"{stem}X.csv"
    status_path = parent / f"{stem}status.json"
    write_matrix_csv(result.X, x_path)
    record = {
        "scheme": result.scheme,
        "status": result.status.value,
        "accepted": None if result.accepted is None else [i + 1 for i in result.accepted],
        "solver_iterations": result.solver_iterations,
        "runtime_s": result.runtime_s,
        "column_status": None
        if result.column_status is None
        else [s.value for s in result.column_status],
    }
    status_path.write_text(json.dumps(record, indent=2) + "\n")
    return x_path, status_path


def ingest(manifest_path) -> MeasurementSet:
    """Load a measurement set from its manifest; validates shapes and field."""
    return load_measurements(manifest_path)
