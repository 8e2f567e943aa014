"""Recovery schemes for symmetric graph matrices from A = B Y + Z.

Three families:

* ``three-stage``: recover every column by l1 minimization, find a subset of
  n - K columns that are pairwise symmetry-consistent (|X_ij - X_ji| <= 2
  gamma), then complete the K rejected columns from symmetry plus a K x K
  linear solve on a well-conditioned row subset.
* ``heuristic``: polynomial-time iterative variant. Each round solves the
  reduced per-column l1 problems, scores columns by their total symmetry
  mismatch, freezes the s best-scoring columns (mirroring them into rows),
  and eliminates them from the linear system. Once fewer columns remain than
  measurement rows, rows are subsampled to keep the reduced system square.
* ``column-bp`` / ``vectorized-bp`` / ``vectorized-bp-sym``: basis-pursuit
  baselines; the symmetric variant optimizes over upper-triangle variables
  with the entrywise l1 objective (off-diagonal entries counted twice).

The 2*gamma consistency test carries a small absolute slack
(``consistency_atol``) because exact solves agree only to rounding error,
never bitwise, even in the noiseless case.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np
import scipy.linalg

from .errors import ConfigError, SingularMatrixError, SizeGuardError
from .measurement import MeasurementSet
from .rng import stream
from .solver import (
    BatchSolveReport,
    SignCones,
    SolveStatus,
    SolverOptions,
    solve_l1_batch,
    solve_square,
    _ball_project,
    _col_norms,
    _init_rho,
    _l1,
    _shrink,
)

SCHEMES = ("three-stage", "heuristic", "column-bp", "vectorized-bp", "vectorized-bp-sym")


class RecoveryStatus(enum.Enum):
    SUCCESS = "success"
    CONSISTENCY_FAILED = "consistency_failed"
    SOLVER_FAILED = "solver_failed"


@dataclass(frozen=True)
class RecoveryConfig:
    """Scheme selection plus the shared solver and consistency parameters."""

    scheme: str = "three-stage"
    gamma: float = 0.0
    K: int = 0
    s: int | None = None
    mu_hint: int | None = None
    solver: SolverOptions = field(default_factory=SolverOptions)
    seed: int = 0
    consistency_atol: float = 1e-6
    subset_cap: int = 200_000
    cone_pattern: str | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if self.gamma < 0 or self.K < 0:
            raise ConfigError("gamma and K must be non-negative")
        if self.s is not None and self.s < 1:
            raise ConfigError("s must be >= 1")
        if self.cone_pattern not in (None, "admittance"):
            raise ConfigError("cone_pattern must be None or 'admittance'")


@dataclass
class RecoveryResult:
    X: np.ndarray
    status: RecoveryStatus
    scheme: str
    accepted: tuple[int, ...] | None = None
    scores: list[np.ndarray] | None = None
    column_status: list[SolveStatus] | None = None
    solver_iterations: int = 0
    runtime_s: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status is RecoveryStatus.SUCCESS


def _solver_opts(ms: MeasurementSet, cfg: RecoveryConfig, k: int, cols=None) -> SolverOptions:
    cones = None
    if cfg.cone_pattern == "admittance":
        cones = SignCones.admittance_pattern(k, columns=cols)
    return replace(cfg.solver, gamma=cfg.gamma, cones=cones)


def retrieve_columns(ms: MeasurementSet, cfg: RecoveryConfig):
    """Stage (a): per-column l1 solves; failures recorded without aborting."""
    opts = _solver_opts(ms, cfg, ms.n)
    report = solve_l1_batch(ms.B, ms.A, opts)
    return report.X.copy(), report


def consistency_check(
    X: np.ndarray,
    K: int,
    gamma: float,
    atol: float = 1e-6,
    cap: int = 200_000,
) -> tuple[int, ...] | None:
    """Stage (b): first subset S (lexicographic, |S| = n - K) passing the 2 gamma test."""
    X = np.asarray(X)
    n = X.shape[0]
    if X.shape != (n, n):
        raise ConfigError(f"consistency check requires a square matrix, got {X.shape}")
    if not (0 <= K <= n):
        raise ConfigError(f"K must lie in [0, {n}], got {K}")
    if K > 1 and not (n <= 30 and K <= 3):
        raise SizeGuardError(f"subset enumeration for n={n}, K={K} is out of budget")
    total = math.comb(n, K)
    if total > cap:
        raise SizeGuardError(f"{total} subsets exceed the cap of {cap}")

    viol = np.abs(X - X.T) > 2 * gamma + atol
    if not viol.any():
        return tuple(range(n - K))
    for S in combinations(range(n), n - K):
        idx = np.fromiter(S, dtype=np.intp)
        if not viol[np.ix_(idx, idx)].any():
            return S
    return None


def _select_rows(B_sbar: np.ndarray, m: int, K: int, cfg: RecoveryConfig):
    """Best-conditioned K rows by pivoted QR, then seeded random retries."""
    _, _, piv = scipy.linalg.qr(B_sbar.T, mode="economic", pivoting=True)
    yield np.sort(piv[:K])
    rng = stream(cfg.seed, 0x5E1EC7)
    for _ in range(5):
        yield np.sort(rng.choice(m, size=K, replace=False))


def resolve_unknowns(
    ms: MeasurementSet, X: np.ndarray, S, cfg: RecoveryConfig
) -> np.ndarray:
    """Stage (c): fill rejected columns from symmetry plus a K x K solve."""
    n = ms.n
    S = sorted(S)
    sbar = sorted(set(range(n)) - set(S))
    K = len(sbar)
    X = np.array(X, copy=True)
    if K == 0:
        return X
    if K > ms.m:
        raise ConfigError(f"cannot resolve {K} unknown rows from m={ms.m} measurements")
    s_idx = np.asarray(S, dtype=np.intp)
    b_idx = np.asarray(sbar, dtype=np.intp)
    # Accepted columns give the rejected columns' entries on S by symmetry.
    X[np.ix_(s_idx, b_idx)] = X[np.ix_(b_idx, s_idx)].T

    last_err: Exception | None = None
    for rows in _select_rows(ms.B[:, b_idx], ms.m, K, cfg):
        try:
            Bk = ms.B[np.ix_(rows, b_idx)]
            rhs = ms.A[np.ix_(rows, b_idx)] - ms.B[np.ix_(rows, s_idx)] @ X[np.ix_(s_idx, b_idx)]
            sol = solve_square(Bk, rhs)
            X[np.ix_(b_idx, b_idx)] = sol.x
            return X
        except SingularMatrixError as err:
            last_err = err
    raise SingularMatrixError(f"row selection failed after retries: {last_err}")


def three_stage(ms: MeasurementSet, cfg: RecoveryConfig) -> RecoveryResult:
    """Stages (a) column retrieval, (b) consistency check, (c) completion."""
    t0 = time.perf_counter()
    Xa, rep = retrieve_columns(ms, cfg)
    S = consistency_check(Xa, cfg.K, cfg.gamma, cfg.consistency_atol, cfg.subset_cap)
    if S is None:
        return RecoveryResult(
            X=Xa, status=RecoveryStatus.CONSISTENCY_FAILED, scheme="three-stage",
            column_status=list(rep.statuses), solver_iterations=rep.iterations,
            runtime_s=time.perf_counter() - t0,
        )
    try:
        X = resolve_unknowns(ms, Xa, S, cfg)
        status = RecoveryStatus.SUCCESS
    except SingularMatrixError:
        X, status = Xa, RecoveryStatus.SOLVER_FAILED
    return RecoveryResult(
        X=X, status=status, scheme="three-stage", accepted=tuple(S),
        column_status=list(rep.statuses), solver_iterations=rep.iterations,
        runtime_s=time.perf_counter() - t0,
    )


def heuristic(ms: MeasurementSet, cfg: RecoveryConfig) -> RecoveryResult:
    """Iterative dimension-reduction recovery; output is exactly symmetric."""
    t0 = time.perf_counter()
    n = ms.n
    s = cfg.s if cfg.s is not None else math.ceil(n / 2)
    if not (1 <= s <= n):
        raise ConfigError(f"s must lie in [1, {n}], got {s}")
    rng = stream(cfg.seed, 0xD1CE)

    X = np.zeros((n, n), dtype=ms.field_tag.dtype)
    remaining = np.arange(n)
    B_cur = np.array(ms.B)
    A_cur = np.array(ms.A)
    scores_log: list[np.ndarray] = []
    statuses: list[SolveStatus] = []
    iters = 0

    for _ in range(math.ceil(n / s)):
        k_r = remaining.size
        if k_r == 0:
            break
        if k_r < B_cur.shape[0]:
            # Keep the reduced system square once columns outnumber rows no more.
            rows = np.sort(rng.choice(B_cur.shape[0], size=k_r, replace=False))
            B_cur = B_cur[rows]
            A_cur = A_cur[rows]
        opts = _solver_opts(ms, cfg, k_r)
        rep = solve_l1_batch(B_cur, A_cur, opts)
        iters += rep.iterations
        statuses.extend(rep.statuses)
        Xr = rep.X

        scores = np.abs(Xr - Xr.T).sum(axis=0)
        scores_log.append(scores.copy())
        order = np.lexsort((np.arange(k_r), scores))
        fixed_pos = np.sort(order[: min(s, k_r)])

        for pos_j in fixed_pos:
            j = remaining[pos_j]
            X[remaining, j] = Xr[:, pos_j]
            X[j, remaining] = Xr[:, pos_j]

        keep_mask = np.ones(k_r, dtype=bool)
        keep_mask[fixed_pos] = False
        keep_pos = np.flatnonzero(keep_mask)
        if keep_pos.size == 0:
            break
        # Eliminate the fixed entries: their mirrored values are known rows now.
        M = Xr[np.ix_(keep_pos, fixed_pos)].T
        A_cur = A_cur[:, keep_pos] - B_cur[:, fixed_pos] @ M
        B_cur = B_cur[:, keep_pos]
        remaining = remaining[keep_pos]

    failed = any(st is SolveStatus.INFEASIBLE for st in statuses)
    return RecoveryResult(
        X=X,
        status=RecoveryStatus.SOLVER_FAILED if failed else RecoveryStatus.SUCCESS,
        scheme="heuristic",
        scores=scores_log,
        column_status=statuses,
        solver_iterations=iters,
        runtime_s=time.perf_counter() - t0,
    )


def _upper_indices(n: int):
    iu, ju = np.triu_indices(n)
    idx = np.full((n, n), -1, dtype=np.intp)
    idx[iu, ju] = np.arange(iu.size)
    idx[ju, iu] = idx[iu, ju]
    return iu, ju, idx


def _sym_design(B: np.ndarray, n: int):
    """Design matrix mapping upper-triangle variables to vec-by-column B Y."""
    m = B.shape[0]
    iu, ju, idx = _upper_indices(n)
    t = iu.size
    M = np.zeros((m * n, t), dtype=B.dtype)
    for j in range(n):
        block = M[j * m : (j + 1) * m]
        for i in range(n):
            block[:, idx[i, j]] += B[:, i]
    weights = np.where(iu == ju, 1.0, 2.0)
    return M, weights, (iu, ju, idx)


def _sym_cones(n: int, iu, ju) -> SignCones:
    re = np.where(iu == ju, 1, -1).astype(np.int8)
    im = np.where(iu == ju, 0, 1).astype(np.int8)
    return SignCones(re=re, im=im)


def vectorized_bp(ms: MeasurementSet, symmetric: bool, cfg: RecoveryConfig) -> RecoveryResult:
    """Basis pursuit over the whole matrix, optionally with hard symmetry."""
    if not symmetric:
        t0 = time.perf_counter()
        X, rep = retrieve_columns(ms, cfg)
        failed = any(st is SolveStatus.INFEASIBLE for st in rep.statuses)
        return RecoveryResult(
            X=X,
            status=RecoveryStatus.SOLVER_FAILED if failed else RecoveryStatus.SUCCESS,
            scheme="column-bp",
            column_status=list(rep.statuses),
            solver_iterations=rep.iterations,
            runtime_s=time.perf_counter() - t0,
        )

    t0 = time.perf_counter()
    n = ms.n
    M, weights, (iu, ju, idx) = _sym_design(ms.B, n)
    cones = _sym_cones(n, iu, ju) if cfg.cone_pattern == "admittance" else None
    # Scale variables so the engine's plain l1 equals the weighted objective.
    M_scaled = M / weights[None, :]
    opts = replace(cfg.solver, gamma=cfg.gamma, cones=cones)

    if cfg.gamma == 0:
        rep = solve_l1_batch(M_scaled, ms.A.T.reshape(-1, 1), opts)
        u = rep.X[:, 0]
        iters = rep.iterations
        statuses = list(rep.statuses)
    else:
        u, iters, ok = _sym_ball_solve(M_scaled, ms.A, n, opts)
        statuses = [SolveStatus.OPTIMAL if ok else SolveStatus.MAX_ITERS]
    v = u / weights

    X = np.zeros((n, n), dtype=ms.field_tag.dtype)
    X[iu, ju] = v
    X[ju, iu] = v
    failed = any(st is SolveStatus.INFEASIBLE for st in statuses)
    return RecoveryResult(
        X=X,
        status=RecoveryStatus.SOLVER_FAILED if failed else RecoveryStatus.SUCCESS,
        scheme="vectorized-bp-sym",
        column_status=statuses,
        solver_iterations=iters,
        runtime_s=time.perf_counter() - t0,
    )


def _sym_ball_solve(M: np.ndarray, A: np.ndarray, n: int, opts: SolverOptions):
    """ADMM for the symmetric variant with a per-column residual ball.

    Variables (v, w = v, z = M v); z is reshaped to m x n and each column is
    projected onto the radius-gamma ball around the matching column of A.
    """
    m = A.shape[0]
    t = M.shape[1]
    gamma = opts.gamma
    a = A.T.reshape(-1)

    ls, *_ = np.linalg.lstsq(M, a, rcond=None)
    fac = scipy.linalg.cho_factor(np.eye(t, dtype=M.dtype) + M.conj().T @ M)

    def ball(vec):
        Zm = vec.reshape(n, m).T
        Zp = _ball_project(Zm, A, gamma)
        return Zp.T.reshape(-1)

    w = ls.copy()
    z = ball(M @ w)
    uw = np.zeros_like(w)
    uz = np.zeros_like(z)
    rho = float(_init_rho(ls[:, None])[0])
    alpha = opts.over_relax
    converged = False
    it = 0
    for it in range(1, opts.max_iters + 1):
        x = scipy.linalg.cho_solve(fac, (w - uw) + M.conj().T @ (z - uz))
        v = M @ x
        xh = alpha * x + (1 - alpha) * w
        vh = alpha * v + (1 - alpha) * z
        w_new = _shrink(xh + uw, 1.0 / rho)
        if opts.cones is not None:
            w_new = opts.cones.project(w_new)
        z_new = ball(vh + uz)
        uw = uw + xh - w_new
        uz = uz + vh - z_new
        if it % opts.check_every == 0 or it == opts.max_iters:
            r_pri = math.hypot(np.linalg.norm(x - w_new), np.linalg.norm(v - z_new))
            s_dual = rho * np.linalg.norm((w_new - w) + M.conj().T @ (z_new - z))
            scale_p = max(np.linalg.norm(x), np.linalg.norm(w_new), np.linalg.norm(z_new))
            eps_pri = math.sqrt(t + z.size) * opts.eps_abs + opts.eps_rel * scale_p
            eps_dual = math.sqrt(t) * opts.eps_abs + opts.eps_rel * rho * np.linalg.norm(
                uw + M.conj().T @ uz
            )
            w, z = w_new, z_new
            if r_pri <= eps_pri and s_dual <= eps_dual:
                converged = True
                break
            if opts.adaptive_rho:
                if r_pri > 10 * s_dual:
                    uw *= 0.5
                    uz *= 0.5
                    rho *= 2.0
                elif s_dual > 10 * r_pri:
                    uw *= 2.0
                    uz *= 2.0
                    rho *= 0.5
            continue
        w, z = w_new, z_new
    return w, it, converged


def recover(ms: MeasurementSet, cfg: RecoveryConfig) -> RecoveryResult:
    """Run the configured scheme on a measurement set."""
    if cfg.scheme == "three-stage":
        return three_stage(ms, cfg)
    if cfg.scheme == "heuristic":
        return heuristic(ms, cfg)
    if cfg.scheme in ("column-bp", "vectorized-bp"):
        result = vectorized_bp(ms, symmetric=False, cfg=cfg)
        result.scheme = cfg.scheme
        return result
    if cfg.scheme == "vectorized-bp-sym":
        return vectorized_bp(ms, symmetric=True, cfg=cfg)
    raise ConfigError(f"unknown scheme {cfg.scheme!r}")
