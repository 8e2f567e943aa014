"""Synthesis and ingestion of linear measurements A = B Y + Z.

B is the m x n generator matrix (known inputs, e.g. voltage phasors), A the
m x n measurement matrix (observed outputs, e.g. current phasors), Z additive
Gaussian noise. Complex noise puts independent N(0, sigma^2) on the real and
imaginary components.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .graphs import Field, GraphMatrix, _as_field_array, read_matrix_csv, write_matrix_csv


@dataclass(frozen=True)
class MeasurementSet:
    """A matched (B, A) pair with the parameters that generated it."""

    B: np.ndarray
    A: np.ndarray
    field_tag: Field
    sigma_S: float = 1.0
    sigma_N: float = 0.0

    def __post_init__(self):
        B = _as_field_array(self.B, self.field_tag)
        A = _as_field_array(self.A, self.field_tag)
        if B.ndim != 2 or A.shape != B.shape:
            raise ConfigError(f"B and A must share an m x n shape, got {B.shape} vs {A.shape}")
        B.setflags(write=False)
        A.setflags(write=False)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "A", A)

    @property
    def m(self) -> int:
        return self.B.shape[0]

    @property
    def n(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True)
class NominalModel:
    """Operating-point rows: every measurement row is nominal + perturbation."""

    A_bar_row: np.ndarray
    B_bar_row: np.ndarray

    @staticmethod
    def from_graph_matrix(Y: GraphMatrix, B_bar_row: np.ndarray) -> "NominalModel":
        b = _as_field_array(np.asarray(B_bar_row), Y.field_tag).ravel()
        if b.shape != (Y.n,):
            raise ConfigError(f"nominal row must have length {Y.n}")
        return NominalModel(A_bar_row=b @ Y.values, B_bar_row=b)


def sample_generator(
    m: int,
    n: int,
    field_tag: Field,
    sigma_S: float,
    rng: np.random.Generator,
    mean_re: float = 0.0,
) -> np.ndarray:
    """Gaussian IID generator matrix.

    Real mode: entries N(mean_re, sigma_S^2). Complex mode: real components
    N(mean_re, sigma_S^2) and imaginary components N(0, sigma_S^2).
    """
    if m < 1 or n < 1:
        raise ConfigError("generator shape must be at least 1 x 1")
    if sigma_S <= 0:
        raise ConfigError(f"sigma_S must be positive, got {sigma_S}")
    re = rng.normal(mean_re, sigma_S, size=(m, n))
    if field_tag is Field.REAL:
        return re
    return re + 1j * rng.normal(0.0, sigma_S, size=(m, n))


def _noise(shape, field_tag: Field, sigma_N: float, rng: np.random.Generator) -> np.ndarray:
    if sigma_N == 0:
        return np.zeros(shape, dtype=field_tag.dtype)
    z = rng.normal(0.0, sigma_N, size=shape)
    if field_tag is Field.COMPLEX:
        z = z + 1j * rng.normal(0.0, sigma_N, size=shape)
    return z


def synthesize(
    B: np.ndarray,
    Y: GraphMatrix,
    sigma_N: float,
    rng: np.random.Generator | None = None,
    sigma_S: float = 1.0,
) -> MeasurementSet:
    """Form A = B Y + Z with IID Gaussian Z of per-component std sigma_N."""
    B = _as_field_array(B, Y.field_tag)
    if B.ndim != 2 or B.shape[1] != Y.n:
        raise ConfigError(f"B must be m x {Y.n}, got {B.shape}")
    if sigma_N < 0:
        raise ConfigError("sigma_N must be non-negative")
    if sigma_N > 0 and rng is None:
        raise ConfigError("noisy synthesis requires an rng")
    if not (1 <= B.shape[0] <= Y.n):
        raise ConfigError(f"synthesis requires 1 <= m <= n, got m={B.shape[0]}, n={Y.n}")
    A = B @ Y.values + _noise(B.shape, Y.field_tag, sigma_N, rng)
    return MeasurementSet(B=B, A=A, field_tag=Y.field_tag, sigma_S=1.0, sigma_N=sigma_N)


def power_flow_like(
    Y: GraphMatrix,
    V_nominal: np.ndarray,
    fluct_sigma: float,
    m: int,
    sigma_N: float,
    rng: np.random.Generator,
    noise_on: str = "A",
) -> MeasurementSet:
    """Nominal-plus-fluctuation rows: V_t = V_nominal + fluctuation, I_t = Y V_t.

    ``noise_on="A"`` adds measurement noise to the currents (the A = BY + Z
    model the theory covers). ``noise_on="B"`` perturbs the voltages instead
    and computes exact currents from the perturbed voltages, mirroring a
    simulator that re-solves the network after jittering inputs.
    """
    if noise_on not in ("A", "B"):
        raise ConfigError("noise_on must be 'A' or 'B'")
    v_bar = _as_field_array(np.asarray(V_nominal), Y.field_tag).ravel()
    if v_bar.shape != (Y.n,):
        raise ConfigError(f"nominal voltage must have length {Y.n}")
    V = v_bar[None, :] + _noise((m, Y.n), Y.field_tag, fluct_sigma, rng)
    if noise_on == "B":
        V = V + _noise((m, Y.n), Y.field_tag, sigma_N, rng)
        I = V @ Y.values
    else:
        I = V @ Y.values + _noise((m, Y.n), Y.field_tag, sigma_N, rng)
    return MeasurementSet(B=V, A=I, field_tag=Y.field_tag, sigma_S=fluct_sigma or 1.0, sigma_N=sigma_N)


def extract_perturbation(ms: MeasurementSet, nominal: NominalModel) -> MeasurementSet:
    """Subtract the nominal operating rows: (A - A_bar, B - B_bar)."""
    a_bar = _as_field_array(np.asarray(nominal.A_bar_row), ms.field_tag).ravel()
    b_bar = _as_field_array(np.asarray(nominal.B_bar_row), ms.field_tag).ravel()
    if a_bar.shape != (ms.n,) or b_bar.shape != (ms.n,):
        raise ConfigError(f"nominal rows must have length {ms.n}")
    return replace(ms, B=ms.B - b_bar[None, :], A=ms.A - a_bar[None, :])


# ---------------------------------------------------------------------------
# On-disk format: manifest JSON + two dense matrix CSVs.
# ---------------------------------------------------------------------------

def save_measurements(ms: MeasurementSet, directory, prefix: str = "", seed: int | None = None) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    b_name, a_name = f"{prefix}B.csv", f"{prefix}A.csv"
    write_matrix_csv(ms.B, directory / b_name)
    write_matrix_csv(ms.A, directory / a_name)
    manifest = {
        "m": ms.m,
        "n": ms.n,
        "field": ms.field_tag.value,
        "sigma_S": ms.sigma_S,
        "sigma_N": ms.sigma_N,
        "seed": seed,
        "b_file": b_name,
        "a_file": a_name,
    }
    path = directory / f"{prefix}manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path


def load_measurements(manifest_path) -> MeasurementSet:
    manifest_path = Path(manifest_path)
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{manifest_path}: invalid JSON ({exc})") from exc
    for key in ("m", "n", "field", "b_file", "a_file"):
        if key not in manifest:
            raise ConfigError(f"{manifest_path}: manifest missing key {key!r}")
    try:
        field_tag = Field(manifest["field"])
    except ValueError as exc:
        raise ConfigError(f"{manifest_path}: unknown field {manifest['field']!r}") from exc
    B = read_matrix_csv(manifest_path.parent / manifest["b_file"], field_tag)
    A = read_matrix_csv(manifest_path.parent / manifest["a_file"], field_tag)
    m, n = int(manifest["m"]), int(manifest["n"])
    if B.shape != (m, n):
        raise ConfigError(f"{manifest_path}: B shape {B.shape} disagrees with manifest ({m},{n})")
    if A.shape != (m, n):
        raise ConfigError(f"{manifest_path}: A shape {A.shape} disagrees with manifest ({m},{n})")
    if m > n:
        warnings.warn(f"ingested measurements have m={m} > n={n}; recovery assumes m <= n")
    return MeasurementSet(
        B=B,
        A=A,
        field_tag=field_tag,
        sigma_S=float(manifest.get("sigma_S", 1.0)),
        sigma_N=float(manifest.get("sigma_N", 0.0)),
    )
