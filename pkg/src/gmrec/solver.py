"""l1-minimization engines and brute-force matrix diagnostics.

The solver minimizes the entrywise l1 norm (complex modulus in complex mode)
subject to ``||B x - a||_2 <= gamma`` plus optional per-entry sign cones on
the real/imaginary components. Two operator-splitting paths:

* gamma = 0: alternate an exact affine projection onto {x : B x = a} with
  soft-thresholding (plus cone projection) and a scaled dual update.
* gamma > 0: splitting on (x, w = x, z = B x) where w absorbs shrinkage and
  z is projected onto the radius-gamma ball around a; the x-update solves a
  prefactorized (I + B^H B) system.

Both run in lockstep over many right-hand sides (one per matrix column),
which is how the recovery schemes call them. Solutions are not trusted
blindly: a support-restricted re-solve ("polish") plus a least-squares dual
certificate confirm optimality, allowing early exit at machine-precision
accuracy on exactly recoverable instances.

Soft-thresholding followed by cone projection is the exact prox of
|.| + indicator for real sign constraints; for complex entries it is a
projection heuristic (validated against grid-search oracles in the tests).
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import ConfigError, SingularMatrixError, SizeGuardError

_TINY = 1e-300


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    MAX_ITERS = "max_iters"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class SignCones:
    """Per-entry sign constraints: -1 means <= 0, +1 means >= 0, 0 free.

    ``re`` and ``im`` are int8 arrays, either length k (same for every
    column) or k x c (per column). ``im`` is ignored for real variables.
    """

    re: np.ndarray
    im: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "re", np.asarray(self.re, dtype=np.int8))
        if self.im is not None:
            object.__setattr__(self, "im", np.asarray(self.im, dtype=np.int8))

    @staticmethod
    def admittance_pattern(n: int, columns=None) -> "SignCones":
        """Power-grid pattern: off-diagonal re <= 0 and im >= 0, diagonal re >= 0."""
        cols = np.arange(n) if columns is None else np.asarray(columns)
        re = np.full((n, cols.size), -1, dtype=np.int8)
        im = np.ones((n, cols.size), dtype=np.int8)
        for pos, j in enumerate(cols):
            if 0 <= j < n:
                re[j, pos] = 1
                im[j, pos] = 0
        return SignCones(re=re, im=im)

    def _aligned(self, x: np.ndarray):
        re, im = self.re, self.im
        if x.ndim == 2 and re.ndim == 1:
            re = re[:, None]
            im = None if im is None else im[:, None]
        elif x.ndim == 1 and re.ndim == 2:
            if re.shape[1] != 1:
                raise ConfigError("per-column cones require a matching 2-d variable")
            re = re[:, 0]
            im = None if im is None else im[:, 0]
        return re, im

    def project(self, x: np.ndarray) -> np.ndarray:
        cre, cim = self._aligned(x)
        if np.iscomplexobj(x):
            re = x.real.copy()
            im = x.imag.copy()
            np.minimum(re, 0.0, out=re, where=cre < 0)
            np.maximum(re, 0.0, out=re, where=cre > 0)
            if cim is not None:
                np.minimum(im, 0.0, out=im, where=cim < 0)
                np.maximum(im, 0.0, out=im, where=cim > 0)
            return re + 1j * im
        out = x.copy()
        np.minimum(out, 0.0, out=out, where=cre < 0)
        np.maximum(out, 0.0, out=out, where=cre > 0)
        return out

    def violation(self, x: np.ndarray) -> np.ndarray | float:
        """Max constraint violation, per column for 2-d input."""
        cre, cim = self._aligned(x)
        re = x.real if np.iscomplexobj(x) else x
        v = np.maximum(np.where(cre > 0, -re, 0.0), np.where(cre < 0, re, 0.0))
        if np.iscomplexobj(x) and cim is not None:
            im = x.imag
            vi = np.maximum(np.where(cim > 0, -im, 0.0), np.where(cim < 0, im, 0.0))
            v = np.maximum(v, vi)
        return v.max(axis=0) if x.ndim == 2 else float(v.max(initial=0.0))

    def column(self, j: int) -> "SignCones":
        if self.re.ndim == 1:
            return self
        return SignCones(re=self.re[:, j], im=None if self.im is None else self.im[:, j])

    def take_rows(self, idx) -> "SignCones":
        return SignCones(re=self.re[idx], im=None if self.im is None else self.im[idx])


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for the l1 engine; defaults suit desk-scale exact recovery."""

    gamma: float = 0.0
    max_iters: int = 20000
    eps_abs: float = 1e-9
    eps_rel: float = 1e-9
    over_relax: float = 1.7
    adaptive_rho: bool = True
    polish: bool = True
    check_every: int = 25
    polish_every: int = 100
    cones: SignCones | None = None
    feas_atol: float = 1e-7
    certify_tol: float = 1e-6
    seed: int | None = None

    def __post_init__(self):
        if self.gamma < 0:
            raise ConfigError("gamma must be non-negative")
        if self.eps_abs <= 0 or self.eps_rel <= 0:
            raise ConfigError("tolerances must be positive")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be >= 1")
        if not (1.0 <= self.over_relax < 2.0):
            raise ConfigError("over_relax must lie in [1, 2)")


@dataclass(frozen=True)
class SolveReport:
    x: np.ndarray
    residual: float
    objective: float
    iterations: int
    status: SolveStatus
    certified: bool = False


@dataclass(frozen=True)
class BatchSolveReport:
    """Column-wise solutions of min ||X_j||_1 s.t. ||B X_j - A_j|| <= gamma."""

    X: np.ndarray
    residuals: np.ndarray
    objectives: np.ndarray
    statuses: list[SolveStatus]
    iterations: int
    certified: np.ndarray

    def column(self, j: int) -> SolveReport:
        return SolveReport(
            x=self.X[:, j].copy(),
            residual=float(self.residuals[j]),
            objective=float(self.objectives[j]),
            iterations=self.iterations,
            status=self.statuses[j],
            certified=bool(self.certified[j]),
        )

    @property
    def all_optimal(self) -> bool:
        return all(s is SolveStatus.OPTIMAL for s in self.statuses)


def _l1(X: np.ndarray) -> np.ndarray:
    return np.abs(X).sum(axis=0)


def _col_norms(X: np.ndarray) -> np.ndarray:
    return np.linalg.norm(X, axis=0)


def _shrink(W: np.ndarray, kappa) -> np.ndarray:
    """Soft-thresholding of the modulus; preserves phase in complex mode."""
    mag = np.abs(W)
    scale = np.maximum(1.0 - kappa / np.maximum(mag, _TINY), 0.0)
    return W * scale


def _phases(x: np.ndarray, supp: np.ndarray) -> np.ndarray:
    vals = x[supp]
    if np.iscomplexobj(x):
        return vals / np.abs(vals)
    return np.sign(vals)


# ---------------------------------------------------------------------------
# Dual certificate
# ---------------------------------------------------------------------------


def dual_certificate(
    B: np.ndarray,
    a: np.ndarray,
    x: np.ndarray,
    gamma: float = 0.0,
    cones: SignCones | None = None,
    tol: float = 1e-6,
) -> bool:
    """Least-squares dual certificate for l1 optimality of a feasible x.

    Builds the candidate dual from the support (least squares on the support
    for gamma = 0; a non-negative multiple of the residual direction when the
    ball is active) and checks the subgradient inclusion entrywise, relaxed
    by the normal cone of any active sign constraint. Conservative: False
    only means this particular construction failed.
    """
    B = np.asarray(B)
    a = np.asarray(a).ravel()
    x = np.asarray(x).ravel()
    scale = 1.0 + float(np.linalg.norm(a))
    xmax = float(np.max(np.abs(x), initial=0.0))
    r = B @ x - a
    rn = float(np.linalg.norm(r))
    if rn > gamma * (1 + 1e-7) + max(tol, 1e-7) * scale:
        return False
    if cones is not None and cones.violation(x) > tol * (1 + xmax):
        return False

    supp = np.abs(x) > max(1e-12, 1e-7 * xmax)
    if gamma > 0:
        if rn < gamma * (1 - 1e-6):
            # Ball inactive: the l1 gradient must vanish, so only x = 0 passes.
            return not supp.any()
        if not supp.any():
            return True
        h = -(B.conj().T @ r) / rn
        ph = _phases(x, supp)
        hs = h[supp]
        denom = float(np.real(np.vdot(hs, hs)))
        if denom <= _TINY:
            return False
        c = float(np.real(np.vdot(hs, ph))) / denom
        if c < -tol:
            return False
        g = max(c, 0.0) * h
    else:
        if not supp.any():
            return True
        nu, *_ = np.linalg.lstsq(B[:, supp].conj().T, _phases(x, supp), rcond=None)
        g = B.conj().T @ nu

    return _subgradient_check(g, x, supp, cones, tol, xmax)


def _cone_bounds(cones: SignCones | None, x: np.ndarray, xmax: float):
    """Allowed normal-cone intervals (lo, hi) on re and im at each entry."""
    k = x.shape[0]
    lo_re = np.zeros(k)
    hi_re = np.zeros(k)
    lo_im = np.zeros(k)
    hi_im = np.zeros(k)
    if cones is None:
        return lo_re, hi_re, lo_im, hi_im
    cre, cim = cones._aligned(x)
    btol = 1e-7 * (1 + xmax)
    re = x.real if np.iscomplexobj(x) else x
    at_bd = np.abs(re) <= btol
    lo_re[(cre > 0) & at_bd] = -np.inf
    hi_re[(cre < 0) & at_bd] = np.inf
    if np.iscomplexobj(x) and cim is not None:
        at_bd_im = np.abs(x.imag) <= btol
        lo_im[(cim > 0) & at_bd_im] = -np.inf
        hi_im[(cim < 0) & at_bd_im] = np.inf
    return lo_re, hi_re, lo_im, hi_im


def _subgradient_check(g, x, supp, cones, tol, xmax) -> bool:
    lo_re, hi_re, lo_im, hi_im = _cone_bounds(cones, x, xmax)
    g_re = g.real if np.iscomplexobj(g) else np.asarray(g, dtype=float)
    g_im = g.imag if np.iscomplexobj(g) else np.zeros_like(g_re)

    if supp.any():
        ph = _phases(x, supp)
        ph_re = ph.real if np.iscomplexobj(ph) else ph
        ph_im = ph.imag if np.iscomplexobj(ph) else np.zeros_like(ph_re)
        n_re = g_re[supp] - ph_re
        n_im = g_im[supp] - ph_im
        ok = (
            (n_re >= lo_re[supp] - tol)
            & (n_re <= hi_re[supp] + tol)
            & (n_im >= lo_im[supp] - tol)
            & (n_im <= hi_im[supp] + tol)
        )
        if not ok.all():
            return False

    off = ~supp
    if off.any():
        d_re = g_re[off] - np.clip(g_re[off], lo_re[off], hi_re[off])
        d_im = g_im[off] - np.clip(g_im[off], lo_im[off], hi_im[off])
        if np.any(np.hypot(d_re, d_im) > 1 + tol):
            return False
    return True


def certify_l1(B: np.ndarray, a: np.ndarray, x: np.ndarray, opts: SolverOptions) -> bool:
    """Spec-facing wrapper around :func:`dual_certificate`."""
    return dual_certificate(B, a, x, gamma=opts.gamma, cones=opts.cones, tol=opts.certify_tol)


# ---------------------------------------------------------------------------
# Batched ADMM
# ---------------------------------------------------------------------------


class _Prepared(NamedTuple):
    B: np.ndarray
    A: np.ndarray
    a_scale: np.ndarray  # 1 + ||A_j|| per column


def _prepare(B, A) -> _Prepared:
    B = np.asarray(B)
    A = np.asarray(A)
    if B.ndim != 2:
        raise ConfigError(f"B must be 2-d, got shape {B.shape}")
    if A.ndim != 2 or A.shape[0] != B.shape[0]:
        raise ConfigError(f"A must be {B.shape[0]} x c, got {A.shape}")
    dtype = np.complex128 if (np.iscomplexobj(B) or np.iscomplexobj(A)) else np.float64
    B = np.ascontiguousarray(B, dtype=dtype)
    A = np.ascontiguousarray(A, dtype=dtype)
    return _Prepared(B, A, 1.0 + _col_norms(A))


def _init_rho(ref: np.ndarray) -> np.ndarray:
    # Soft-threshold step 1/rho should be commensurate with the entry scale.
    return np.clip(1.0 / np.clip(np.max(np.abs(ref), axis=0, initial=0.0), 1e-3, 1e12), 1e-6, 1e6)


def _polish_column(B, a, supp, cones_j, a_scale):
    """Exact re-solve on a candidate support; None unless feasible and cone-ok."""
    m, k = B.shape
    idx = np.flatnonzero(supp)
    if idx.size > m:
        return None
    x = np.zeros(k, dtype=B.dtype)
    if idx.size:
        sol, *_ = np.linalg.lstsq(B[:, idx], a, rcond=None)
        x[idx] = sol
    res = float(np.linalg.norm(B @ x - a))
    if res > 1e-9 * a_scale:
        return None
    if cones_j is not None:
        xm = float(np.max(np.abs(x), initial=0.0))
        if cones_j.violation(x) > 1e-9 * (1 + xm):
            return None
    return x, res, float(np.abs(x).sum())


def _pick_best(cands, a_scale, gamma):
    """Lowest-objective candidate among the feasible ones; cands = [(x, res, obj)]."""
    best = None
    for x, res, obj in cands:
        if res > gamma * (1 + 1e-7) + 1e-7 * a_scale:
            continue
        if best is None or obj < best[2]:
            best = (x, res, obj)
    return best


def _solve_eq_batch(prep: _Prepared, opts: SolverOptions) -> BatchSolveReport:
    B, A = prep.B, prep.A
    m, k = B.shape
    c = A.shape[1]
    cones = opts.cones

    U_, s, Vh = np.linalg.svd(B, full_matrices=False)
    smax = float(s[0]) if s.size else 0.0
    r = int(np.sum(s > 1e-12 * max(smax, _TINY)))
    Vr = Vh[:r].conj().T
    Q = Vr @ ((U_[:, :r].conj().T @ A) / s[:r, None]) if r else np.zeros((k, c), dtype=B.dtype)
    feas_res = _col_norms(B @ Q - A)
    feasible = feas_res <= 1e-8 * prep.a_scale
    certified = np.zeros(c, dtype=bool)

    if r == k:
        # Full column rank: the feasible set per column is a single point.
        statuses = []
        for j in range(c):
            if not feasible[j]:
                statuses.append(SolveStatus.INFEASIBLE)
            elif cones is not None and cones.column(j).violation(Q[:, j]) > 1e-9 * (
                1 + float(np.max(np.abs(Q[:, j]), initial=0.0))
            ):
                statuses.append(SolveStatus.INFEASIBLE)
            else:
                statuses.append(SolveStatus.OPTIMAL)
        return BatchSolveReport(
            X=Q, residuals=feas_res, objectives=_l1(Q), statuses=statuses,
            iterations=0, certified=certified,
        )

    P = np.eye(k, dtype=B.dtype) - Vr @ Vr.conj().T
    Z = Q.copy()
    U = np.zeros_like(Z)
    rho = _init_rho(Q)
    alpha = opts.over_relax

    best_pol: list = [None] * c
    X = Q.copy()
    converged = np.zeros(c, dtype=bool)
    it = 0
    for it in range(1, opts.max_iters + 1):
        X = P @ (Z - U) + Q
        Xh = alpha * X + (1 - alpha) * Z
        W = Xh + U
        Z_new = _shrink(W, 1.0 / rho)
        if cones is not None:
            Z_new = cones.project(Z_new)
        U = W - Z_new

        if it % opts.check_every == 0 or it == opts.max_iters:
            r_pri = _col_norms(X - Z_new)
            s_dual = rho * _col_norms(Z_new - Z)
            xn = np.maximum(_col_norms(X), _col_norms(Z_new))
            eps_pri = math.sqrt(k) * opts.eps_abs + opts.eps_rel * xn
            eps_dual = math.sqrt(k) * opts.eps_abs + opts.eps_rel * rho * _col_norms(U)
            converged = (r_pri <= eps_pri) & (s_dual <= eps_dual)
            if converged.all():
                Z = Z_new
                break
            if opts.adaptive_rho:
                up = r_pri > 10.0 * s_dual
                down = s_dual > 10.0 * r_pri
                if up.any() or down.any():
                    new_rho = np.clip(rho * np.where(up, 2.0, np.where(down, 0.5, 1.0)), 1e-10, 1e10)
                    U *= rho / new_rho
                    rho = new_rho
        Z = Z_new

        if opts.polish and it % opts.polish_every == 0:
            for j in range(c):
                if not feasible[j] or certified[j]:
                    continue
                cones_j = cones.column(j) if cones is not None else None
                pol = _polish_column(B, A[:, j], np.abs(Z[:, j]) > 0, cones_j, prep.a_scale[j])
                if pol is None:
                    continue
                if best_pol[j] is None or pol[2] < best_pol[j][2]:
                    best_pol[j] = pol
                if dual_certificate(B, A[:, j], pol[0], 0.0, cones_j, opts.certify_tol):
                    certified[j] = True
            if feasible.any() and certified[feasible].all():
                break

    Xout = np.array(X, copy=True)
    res_out = _col_norms(B @ X - A)
    obj_out = _l1(X)
    statuses = []
    for j in range(c):
        cands = []
        if best_pol[j] is not None:
            cands.append(best_pol[j])
        xj = X[:, j]
        cone_ok = cones is None or cones.column(j).violation(xj) <= 1e-7 * (
            1 + float(np.max(np.abs(xj), initial=0.0))
        )
        if cone_ok:
            cands.append((xj, float(res_out[j]), float(obj_out[j])))
        zj = Z[:, j]
        cands.append((zj, float(np.linalg.norm(B @ zj - A[:, j])), float(np.abs(zj).sum())))
        best = _pick_best(cands, prep.a_scale[j], 0.0)
        if best is not None:
            Xout[:, j], res_out[j], obj_out[j] = best
        if not feasible[j]:
            statuses.append(SolveStatus.INFEASIBLE)
        elif converged[j] or certified[j]:
            statuses.append(SolveStatus.OPTIMAL)
        else:
            statuses.append(SolveStatus.MAX_ITERS)

    return BatchSolveReport(
        X=Xout, residuals=res_out, objectives=obj_out, statuses=statuses,
        iterations=it, certified=certified,
    )


def _ball_project(V: np.ndarray, A: np.ndarray, gamma: float) -> np.ndarray:
    D = V - A
    dn = np.maximum(_col_norms(D), _TINY)
    return A + D * np.minimum(1.0, gamma / dn)


def _solve_ball_batch(prep: _Prepared, opts: SolverOptions) -> BatchSolveReport:
    B, A = prep.B, prep.A
    m, k = B.shape
    c = A.shape[1]
    gamma = opts.gamma
    cones = opts.cones

    ls, *_ = np.linalg.lstsq(B, A, rcond=None)
    ls_res = _col_norms(B @ ls - A)
    range_feasible = ls_res <= gamma * (1 + 1e-7) + 1e-9 * prep.a_scale

    Mfac = scipy.linalg.cho_factor(np.eye(k, dtype=B.dtype) + B.conj().T @ B)
    W = ls.copy()
    Z = _ball_project(B @ W, A, gamma)
    Uw = np.zeros((k, c), dtype=B.dtype)
    Uz = np.zeros((m, c), dtype=B.dtype)
    rho = _init_rho(ls)
    alpha = opts.over_relax

    converged = np.zeros(c, dtype=bool)
    it = 0
    for it in range(1, opts.max_iters + 1):
        X = scipy.linalg.cho_solve(Mfac, (W - Uw) + B.conj().T @ (Z - Uz))
        V = B @ X
        Xh = alpha * X + (1 - alpha) * W
        Vh = alpha * V + (1 - alpha) * Z
        W_new = _shrink(Xh + Uw, 1.0 / rho)
        if cones is not None:
            W_new = cones.project(W_new)
        Z_new = _ball_project(Vh + Uz, A, gamma)
        Uw = Uw + Xh - W_new
        Uz = Uz + Vh - Z_new

        check = it % opts.check_every == 0 or it == opts.max_iters
        if check:
            r_pri = np.sqrt(_col_norms(X - W_new) ** 2 + _col_norms(V - Z_new) ** 2)
            s_dual = rho * _col_norms((W_new - W) + B.conj().T @ (Z_new - Z))
            xn = np.sqrt(_col_norms(X) ** 2 + _col_norms(V) ** 2)
            wn = np.sqrt(_col_norms(W_new) ** 2 + _col_norms(Z_new) ** 2)
            eps_pri = math.sqrt(k + m) * opts.eps_abs + opts.eps_rel * np.maximum(xn, wn)
            eps_dual = math.sqrt(k) * opts.eps_abs + opts.eps_rel * rho * _col_norms(
                Uw + B.conj().T @ Uz
            )
            converged = (r_pri <= eps_pri) & (s_dual <= eps_dual)
        W, Z = W_new, Z_new
        if check:
            if converged.all():
                break
            if opts.adaptive_rho:
                up = r_pri > 10.0 * s_dual
                down = s_dual > 10.0 * r_pri
                if up.any() or down.any():
                    new_rho = np.clip(rho * np.where(up, 2.0, np.where(down, 0.5, 1.0)), 1e-10, 1e10)
                    ratio = rho / new_rho
                    Uw *= ratio
                    Uz *= ratio
                    rho = new_rho

    res_out = _col_norms(B @ W - A)
    obj_out = _l1(W)
    statuses = []
    for j in range(c):
        feas = res_out[j] <= gamma * (1 + 1e-7) + opts.feas_atol * prep.a_scale[j]
        if converged[j] and feas:
            statuses.append(SolveStatus.OPTIMAL)
        elif cones is None and not range_feasible[j]:
            statuses.append(SolveStatus.INFEASIBLE)
        elif cones is not None and not converged[j] and _cone_infeasible(
            B, A[:, j], gamma, cones.column(j), prep.a_scale[j]
        ):
            statuses.append(SolveStatus.INFEASIBLE)
        else:
            statuses.append(SolveStatus.MAX_ITERS)
    return BatchSolveReport(
        X=W, residuals=res_out, objectives=obj_out, statuses=statuses,
        iterations=it, certified=np.zeros(c, dtype=bool),
    )


def _cone_infeasible(B, a, gamma, cones_j, a_scale) -> bool:
    """Exact feasibility check: min ||Bx - a|| over the cone via bounded LS."""
    cre = cones_j.re if cones_j.re.ndim == 1 else cones_j.re[:, 0]
    k = B.shape[1]
    if np.iscomplexobj(B) or np.iscomplexobj(a):
        Breal = np.block([[B.real, -B.imag], [B.imag, B.real]])
        target = np.concatenate([np.asarray(a).real, np.asarray(a).imag])
        lo = np.full(2 * k, -np.inf)
        hi = np.full(2 * k, np.inf)
        lo[:k][cre > 0] = 0.0
        hi[:k][cre < 0] = 0.0
        if cones_j.im is not None:
            cim = cones_j.im if cones_j.im.ndim == 1 else cones_j.im[:, 0]
            lo[k:][cim > 0] = 0.0
            hi[k:][cim < 0] = 0.0
    else:
        Breal, target = B, np.asarray(a)
        lo = np.full(k, -np.inf)
        hi = np.full(k, np.inf)
        lo[cre > 0] = 0.0
        hi[cre < 0] = 0.0
    res = scipy.optimize.lsq_linear(Breal, target, bounds=(lo, hi), tol=1e-12)
    return float(np.linalg.norm(res.fun)) > gamma * (1 + 1e-7) + 1e-7 * a_scale


def solve_l1_batch(B: np.ndarray, A: np.ndarray, opts: SolverOptions) -> BatchSolveReport:
    """Solve min ||X_j||_1 s.t. ||B X_j - A_j||_2 <= gamma for every column of A."""
    prep = _prepare(B, A)
    if prep.A.shape[1] == 0:
        return BatchSolveReport(
            X=np.zeros((prep.B.shape[1], 0), dtype=prep.B.dtype),
            residuals=np.zeros(0), objectives=np.zeros(0), statuses=[],
            iterations=0, certified=np.zeros(0, dtype=bool),
        )
    if opts.gamma == 0:
        return _solve_eq_batch(prep, opts)
    return _solve_ball_batch(prep, opts)


def solve_l1(B: np.ndarray, a: np.ndarray, opts: SolverOptions) -> SolveReport:
    """Single right-hand-side form of :func:`solve_l1_batch`."""
    a = np.asarray(a)
    if a.ndim != 1:
        raise ConfigError(f"a must be a vector, got shape {a.shape}")
    return solve_l1_batch(B, a[:, None], opts).column(0)


# ---------------------------------------------------------------------------
# Square solves and brute-force diagnostics
# ---------------------------------------------------------------------------


class SquareSolve(NamedTuple):
    x: np.ndarray
    cond: float


def solve_square(Bsq: np.ndarray, rhs: np.ndarray, cond_limit: float = 1e12) -> SquareSolve:
    """Pivoted-LU solve of a square system; refuses when cond > cond_limit."""
    Bsq = np.asarray(Bsq)
    if Bsq.ndim != 2 or Bsq.shape[0] != Bsq.shape[1]:
        raise ConfigError(f"square solve requires a square matrix, got {Bsq.shape}")
    sv = np.linalg.svd(Bsq, compute_uv=False)
    cond = float("inf") if sv[-1] == 0 else float(sv[0] / sv[-1])
    if not np.isfinite(cond) or cond > cond_limit:
        raise SingularMatrixError(f"condition estimate {cond:.3e} exceeds {cond_limit:.1e}")
    lu, piv = scipy.linalg.lu_factor(Bsq)
    return SquareSolve(scipy.linalg.lu_solve((lu, piv), np.asarray(rhs, dtype=Bsq.dtype)), cond)


def spark(B: np.ndarray, max_cols: int = 20, tol: float = 1e-9) -> int:
    """Smallest number of linearly dependent columns; n+1 if all independent."""
    B = np.asarray(B)
    n = B.shape[1]
    if n > max_cols:
        raise SizeGuardError(f"spark is combinatorial; refusing n={n} > {max_cols}")
    norms = _col_norms(B)
    scale = float(norms.max(initial=0.0))
    if scale == 0.0:
        return 1 if n else n + 1
    if np.any(norms <= tol * scale):
        return 1
    m = B.shape[0]
    for size in range(2, n + 1):
        if size > m:
            # More columns than rows are always dependent.
            return size
        for cols in itertools.combinations(range(n), size):
            sv = np.linalg.svd(B[:, cols], compute_uv=False)
            if sv[-1] <= tol * sv[0]:
                return size
    return n + 1


def ric(B: np.ndarray, mu: int, max_cols: int = 20) -> float:
    """Restricted isometry constant delta_mu by exhaustive subset SVD."""
    B = np.asarray(B)
    n = B.shape[1]
    if n > max_cols:
        raise SizeGuardError(f"ric is combinatorial; refusing n={n} > {max_cols}")
    if not (1 <= mu <= n):
        raise ConfigError(f"mu must lie in [1, {n}], got {mu}")
    m = B.shape[0]
    delta = 0.0
    for size in range(1, mu + 1):
        for cols in itertools.combinations(range(n), size):
            sv = np.linalg.svd(B[:, cols], compute_uv=False)
            # Subsets wider than m are rank-deficient: smallest singular value 0.
            smin = 0.0 if size > m else float(sv[-1])
            delta = max(delta, abs(float(sv[0]) ** 2 - 1.0), abs(1.0 - smin**2))
    return delta


def xi(B: np.ndarray, K: int, max_cols: int = 14, max_K: int = 3) -> float:
    """max over |Sbar| = |Krows| = K of ||B_S||_2 * ||inv(B[Krows, Sbar])||_2.

    Singular K x K submatrices are skipped (the row subset is a free choice);
    the value is +inf only when some Sbar admits no invertible row subset at
    all, e.g. a zero column.
    """
    B = np.asarray(B)
    m, n = B.shape
    if n > max_cols:
        raise SizeGuardError(f"xi is doubly combinatorial; refusing n={n} > {max_cols}")
    if K > max_K:
        raise SizeGuardError(f"xi is doubly combinatorial; refusing K={K} > {max_K}")
    if not (1 <= K <= min(m, n - 1)):
        raise ConfigError(f"K must lie in [1, min(m, n-1)] = [1, {min(m, n - 1)}], got {K}")
    sing_tol = 1e-12 * max(float(np.linalg.norm(B)), _TINY)
    worst = 0.0
    for sbar in itertools.combinations(range(n), K):
        s_cols = [j for j in range(n) if j not in sbar]
        norm_bs = float(np.linalg.svd(B[:, s_cols], compute_uv=False)[0])
        invertible_found = False
        for rows in itertools.combinations(range(m), K):
            sv = np.linalg.svd(B[np.ix_(rows, sbar)], compute_uv=False)
            if float(sv[-1]) <= sing_tol:
                continue
            invertible_found = True
            worst = max(worst, norm_bs / float(sv[-1]))
        if not invertible_found:
            return float("inf")
    return worst


def operator_norm(B: np.ndarray) -> float:
    return float(np.linalg.svd(np.asarray(B), compute_uv=False)[0])
