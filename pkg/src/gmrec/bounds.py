"""Closed-form sample-complexity bounds and sparsity-profile formulas.

Conventions: entropies and the Fano-style error floors are computed in nats
(natural log); the achievability measurement count uses the binary log, as
each formula's source does. Both appear explicitly at the call sites below.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

from .errors import ConfigError, DegenerateRICError
from .ensembles import SparsityProfile
from .solver import operator_norm, ric, xi


def binary_entropy_nats(p: float) -> float:
    """h(p) = -p ln p - (1-p) ln(1-p), with h(0) = h(1) = 0 by continuity."""
    if not (0.0 <= p <= 1.0):
        raise ConfigError(f"probability must lie in [0,1], got {p}")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log(1.0 - p)


def entropy_uniform_trees(n: int) -> float:
    """Entropy (nats) of the uniform distribution on labeled trees: (n-2) ln n."""
    if n < 2:
        raise ConfigError("trees need n >= 2")
    return (n - 2) * math.log(n)


def entropy_er(n: int, p: float) -> float:
    """Entropy (nats) of the Erdos-Renyi (n, p) ensemble: h(p) * C(n, 2)."""
    if n < 1:
        raise ConfigError("n must be positive")
    return binary_entropy_nats(p) * (n * (n - 1) / 2)


@dataclass(frozen=True)
class BoundInputs:
    """Everything the error-floor formulas consume."""

    n: int
    m: int
    sigma_S: float = 1.0
    sigma_N: float = 0.0
    Y_bar: float = 1.0
    entropy_nats: float = 0.0
    mu: int | None = None
    K: int | None = None

    def __post_init__(self):
        if self.n < 1 or self.m < 0:
            raise ConfigError("n must be >= 1 and m >= 0")
        if self.sigma_S <= 0 or self.sigma_N < 0:
            raise ConfigError("sigma_S must be > 0 and sigma_N >= 0")
        if self.Y_bar < 0 or self.entropy_nats < 0:
            raise ConfigError("Y_bar and entropy must be non-negative")


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def _per_measurement_nats_noiseless(inputs: BoundInputs) -> float:
    if inputs.Y_bar == 0.0:
        return -math.inf
    return math.log(2.0 * math.pi * math.e * inputs.Y_bar * inputs.sigma_S**2)


def fano_floor_noiseless(inputs: BoundInputs) -> float:
    """Noiseless floor: 1 - n m ln(2 pi e Ybar sigma_S^2) / (2 H), clamped to [0,1]."""
    if inputs.entropy_nats <= 0:
        return 0.0
    rate = _per_measurement_nats_noiseless(inputs)
    if rate == -math.inf:
        return 1.0
    return _clamp01(1.0 - inputs.n * inputs.m * rate / (2.0 * inputs.entropy_nats))


def fano_floor_noisy(inputs: BoundInputs) -> float:
    """Noisy floor: 1 - n m ln(1 + (sigma_S^2/sigma_N^2) Ybar) / (2 H), clamped."""
    if inputs.entropy_nats <= 0:
        return 0.0
    if inputs.sigma_N == 0:
        raise ConfigError("noisy floor requires sigma_N > 0; use fano_floor_noiseless")
    rate = math.log1p((inputs.sigma_S**2 / inputs.sigma_N**2) * inputs.Y_bar)
    return _clamp01(1.0 - inputs.n * inputs.m * rate / (2.0 * inputs.entropy_nats))


def min_measurements(inputs: BoundInputs, epsilon_target: float) -> int:
    """Smallest integer m whose applicable Fano floor is <= epsilon_target."""
    if not (0.0 < epsilon_target < 1.0):
        raise ConfigError("epsilon_target must lie in (0, 1)")
    if inputs.entropy_nats <= 0:
        return 1
    if inputs.sigma_N > 0:
        rate = math.log1p((inputs.sigma_S**2 / inputs.sigma_N**2) * inputs.Y_bar)
    else:
        rate = _per_measurement_nats_noiseless(inputs)
    if rate <= 0:
        raise ConfigError(
            "per-measurement information is non-positive; the floor never drops "
            "below the target for any m"
        )
    m = max(1, math.ceil(2.0 * inputs.entropy_nats * (1.0 - epsilon_target) / (inputs.n * rate)))
    # Guard the ceiling against boundary rounding either way.
    def floor_at(mm: int) -> float:
        probe = BoundInputs(
            n=inputs.n, m=mm, sigma_S=inputs.sigma_S, sigma_N=inputs.sigma_N,
            Y_bar=inputs.Y_bar, entropy_nats=inputs.entropy_nats,
        )
        return fano_floor_noisy(probe) if inputs.sigma_N > 0 else fano_floor_noiseless(probe)

    while m > 1 and floor_at(m - 1) <= epsilon_target:
        m -= 1
    while floor_at(m) > epsilon_target:
        m += 1
    return m


class SufficientM(NamedTuple):
    """Achievable measurement count with the explicit constant, plus validity.

    ``valid`` is False outside n/mu > 2 and mu >= 4, where the multiplicative
    constant in the underlying concentration argument grows.
    """

    m: int
    valid: bool


def sufficient_m_noiseless(mu: int, K: int, n: int) -> SufficientM:
    """ceil(48 mu (3 + 2 log2(n/mu))) + 2K measurements suffice (binary log)."""
    if mu < 1 or K < 0 or n < 1:
        raise ConfigError("mu >= 1, K >= 0, n >= 1 required")
    m = math.ceil(48.0 * mu * (3.0 + 2.0 * math.log2(n / mu))) + 2 * K
    return SufficientM(m=int(m), valid=(n / mu > 2 and mu >= 4))


def tree_sparsity_profile(mu: int, K: int) -> SparsityProfile:
    """Uniform labeled trees are (mu, K, 1/K)-sparse for mu >= 1, K > 0."""
    if mu < 1 or K < 1:
        raise ConfigError("mu >= 1 and K >= 1 required")
    return SparsityProfile(mu=mu, K=K, rho=min(1.0, 1.0 / K))


def er_sparsity_profile(n: int, p: float, K: int) -> SparsityProfile:
    """Erdos-Renyi profile: mu_min = ceil(2 n h(p)/ln(1/p)), rho = n e^{-n h(p)}/K.

    The entropy h is in nats. A mu_min above n - 2 means the guarantee is
    degenerate for this (n, p); the profile is still returned with mu_min as
    computed so callers can detect it against their n.
    """
    if not (0.0 < p < 1.0):
        raise ConfigError("p must lie strictly in (0, 1)")
    if K < 1:
        raise ConfigError("K must be >= 1")
    h = binary_entropy_nats(p)
    mu_min = math.ceil(2.0 * n * h / math.log(1.0 / p))
    if mu_min > n - 2:
        warnings.warn(f"mu_min={mu_min} exceeds n-2={n - 2}; the profile is degenerate")
    rho = min(1.0, n * math.exp(-n * h) / K)
    return SparsityProfile(mu=int(mu_min), K=K, rho=rho)


def eta_bound(B, K: int, gamma: float, Gamma: float, n: int | None = None) -> float:
    """Frobenius error radius of the three-stage scheme.

    eta = 2 (n Gamma + (Gamma ||B||_2 + gamma)/(1 - delta_2K))
            * (2 (n - K) + K xi(B)),
    with delta_2K and xi computed by exhaustive enumeration (small n only).
    """
    import numpy as np

    B = np.asarray(B)
    n = B.shape[1] if n is None else n
    if gamma < 0 or Gamma < 0:
        raise ConfigError("gamma and Gamma must be non-negative")
    if K == 0:
        first = 2.0 * (n * Gamma + (Gamma * operator_norm(B) + gamma))
        return 0.0 if first == 0.0 else first * (2.0 * n)
    delta = ric(B, min(2 * K, B.shape[1]))
    if delta >= 1.0:
        raise DegenerateRICError(f"delta_2K = {delta:.6f} >= 1")
    first = 2.0 * (n * Gamma + (Gamma * operator_norm(B) + gamma) / (1.0 - delta))
    if first == 0.0:
        return 0.0
    return first * (2.0 * (n - K) + K * xi(B, K))


def default_noise_radius(n: int, sigma_N: float) -> float:
    """The gamma = sqrt(n) sigma_N choice used for noisy recovery presets."""
    return math.sqrt(n) * sigma_N
