"""Undirected graphs and symmetric graph matrices.

A graph matrix is an n x n symmetric matrix whose off-diagonal support is
exactly the edge set of an undirected graph; the diagonal is unconstrained.
The admittance matrix of an electrical network is the canonical example:
``Y[i, j] = -y_ij`` for a line (i, j) and ``Y[i, i] = y_i + sum_k y_ik``.

Nodes are 0-based everywhere in memory. File formats and CLI output are
1-based; the conversion happens only in the read/write helpers here.
"""

from __future__ import annotations

import csv
import enum
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import ConfigError

Edge = tuple[int, int]


class Field(str, enum.Enum):
    """Scalar field of a matrix: real or complex entries."""

    REAL = "real"
    COMPLEX = "complex"

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(np.float64 if self is Field.REAL else np.complex128)


def _as_field_array(values: np.ndarray, fld: Field) -> np.ndarray:
    arr = np.asarray(values)
    if fld is Field.REAL:
        if np.iscomplexobj(arr):
            if np.any(arr.imag != 0):
                raise ConfigError("real-mode array has nonzero imaginary part")
            arr = arr.real
        return np.ascontiguousarray(arr, dtype=np.float64)
    return np.ascontiguousarray(arr, dtype=np.complex128)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes 0..n-1, edges stored as (i, j), i < j."""

    n: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"node count must be positive, got {self.n}")
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))
        for i, j in self.edges:
            if i == j:
                raise ConfigError(f"self-loop ({i},{j}) not allowed")
            if not (0 <= i < j < self.n):
                raise ConfigError(f"edge ({i},{j}) out of range for n={self.n}")

    @staticmethod
    def from_edges(n: int, edges: Iterable[Edge]) -> "Graph":
        """Normalize arbitrary (i, j) pairs into canonical i < j order."""
        canon = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise ConfigError(f"self-loop ({i},{j}) not allowed")
            canon.add((min(i, j), max(i, j)))
        return Graph(n, frozenset(canon))

    @staticmethod
    def star(n: int, hub: int = 0) -> "Graph":
        return Graph.from_edges(n, ((hub, j) for j in range(n) if j != hub))

    @staticmethod
    def chain(n: int) -> "Graph":
        return Graph.from_edges(n, ((j, j + 1) for j in range(n - 1)))

    def degrees(self) -> np.ndarray:
        d = np.zeros(self.n, dtype=np.int64)
        for i, j in self.edges:
            d[i] += 1
            d[j] += 1
        return d

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)


@dataclass(frozen=True)
class GraphMatrix:
    """Symmetric matrix with a graph-structured off-diagonal support."""

    values: np.ndarray
    field_tag: Field

    def __post_init__(self):
        arr = _as_field_array(self.values, self.field_tag)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ConfigError(f"graph matrix must be square, got shape {arr.shape}")
        if not np.array_equal(arr, arr.T):
            raise ConfigError("graph matrix must be exactly symmetric")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def graph(self, threshold: float = 0.0) -> Graph:
        return support(self.values, threshold)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.n else 0.0


@dataclass(frozen=True)
class DegreeProfile:
    """Per-node degrees plus the count of nodes above a degree threshold."""

    degrees: np.ndarray
    mu: int
    large_count: int


def default_weight_sampler(fld: Field, rng: np.random.Generator, size: int) -> np.ndarray:
    """Edge weights uniform on [-100, 100] per component, resampled until |w| >= 1.

    The magnitude floor keeps supports unambiguous against the 1e-5 zero
    threshold used when reading supports off recovered matrices.
    """
    def draw(k):
        w = rng.uniform(-100.0, 100.0, size=k)
        if fld is Field.COMPLEX:
            w = w + 1j * rng.uniform(-100.0, 100.0, size=k)
        return w

    out = draw(size)
    bad = np.abs(out) < 1.0
    while np.any(bad):
        out[bad] = draw(int(bad.sum()))
        bad = np.abs(out) < 1.0
    return out


def build_graph_matrix(
    g: Graph,
    rng: np.random.Generator | None = None,
    *,
    field_tag: Field = Field.REAL,
    weights: Mapping[Edge, complex] | Callable[[np.random.Generator, int], np.ndarray] | None = None,
    diagonal: np.ndarray | str = "rowsum",
) -> GraphMatrix:
    """Build a graph matrix with the given off-diagonal support.

    ``weights`` may be a mapping keyed by canonical edges, a callable
    ``(rng, count) -> array``, or None for the default bounded-away-from-zero
    uniform sampler (which then requires ``rng``). ``diagonal`` is either an
    explicit length-n vector or "rowsum", the admittance-style rule that makes
    every row sum to zero.
    """
    edges = g.sorted_edges()
    if callable(weights):
        if rng is None:
            raise ConfigError("a weight-sampling callable requires an rng")
        w = _as_field_array(weights(rng, len(edges)), field_tag).ravel()
    elif weights is None:
        if rng is None:
            raise ConfigError("default weight sampling requires an rng")
        w = _as_field_array(default_weight_sampler(field_tag, rng, len(edges)), field_tag)
    else:
        missing = set(edges) - set(weights)
        if missing:
            raise ConfigError(f"weights missing for edges {sorted(missing)}")
        w = _as_field_array(np.array([weights[e] for e in edges]), field_tag)
    if len(edges) and np.any(w == 0):
        raise ConfigError("edge weights must be nonzero (support would not match)")

    y = np.zeros((g.n, g.n), dtype=field_tag.dtype)
    for (i, j), wij in zip(edges, w):
        y[i, j] = wij
        y[j, i] = wij
    if isinstance(diagonal, str):
        if diagonal != "rowsum":
            raise ConfigError(f"unknown diagonal rule {diagonal!r}")
        np.fill_diagonal(y, -y.sum(axis=1))
    else:
        np.fill_diagonal(y, _as_field_array(np.asarray(diagonal), field_tag))
    return GraphMatrix(y, field_tag)


def build_admittance(
    g: Graph,
    line_admittances: Mapping[Edge, complex],
    self_admittances: np.ndarray,
    *,
    field_tag: Field = Field.COMPLEX,
) -> GraphMatrix:
    """Nodal admittance matrix: Y[i,j] = -y_ij, Y[i,i] = y_i + sum_k y_ik."""
    keys = {(min(i, j), max(i, j)) for i, j in line_admittances}
    if keys != set(g.edges):
        extra = sorted(keys - set(g.edges))
        missing = sorted(set(g.edges) - keys)
        raise ConfigError(f"line admittance keys mismatch: extra={extra} missing={missing}")
    self_adm = _as_field_array(np.asarray(self_admittances), field_tag).ravel()
    if self_adm.shape != (g.n,):
        raise ConfigError(f"self admittances must have length {g.n}")

    y = np.zeros((g.n, g.n), dtype=field_tag.dtype)
    diag = self_adm.copy()
    for (i, j), yij in line_admittances.items():
        i, j = min(i, j), max(i, j)
        yij = field_tag.dtype.type(yij)
        if yij == 0:
            raise ConfigError(f"zero line admittance on edge ({i},{j})")
        y[i, j] = -yij
        y[j, i] = -yij
        diag[i] += yij
        diag[j] += yij
    np.fill_diagonal(y, diag)
    return GraphMatrix(y, field_tag)


def support(x: GraphMatrix | np.ndarray, threshold: float) -> Graph:
    """Edge set read off a square matrix: max(|X[i,j]|, |X[j,i]|) >= threshold."""
    if threshold < 0:
        raise ConfigError("support threshold must be non-negative")
    arr = x.values if isinstance(x, GraphMatrix) else np.asarray(x)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ConfigError(f"support requires a square matrix, got {arr.shape}")
    mag = np.maximum(np.abs(arr), np.abs(arr).T)
    iu, ju = np.triu_indices(arr.shape[0], k=1)
    keep = mag[iu, ju] >= threshold
    return Graph(arr.shape[0], frozenset(zip(iu[keep].tolist(), ju[keep].tolist())))


def degree_profile(g: Graph, mu: int) -> DegreeProfile:
    """Degrees of every node and the size of {j : degree_j > mu}."""
    hi = max(g.n - 2, 0)
    if not (0 <= mu <= hi):
        clamped = min(max(mu, 0), hi)
        warnings.warn(f"degree threshold mu={mu} clamped to {clamped} (valid range [0,{hi}])")
        mu = clamped
    d = g.degrees()
    return DegreeProfile(degrees=d, mu=int(mu), large_count=int(np.sum(d > mu)))


# ---------------------------------------------------------------------------
# File formats. Graph CSV: header "i,j,re,im", one edge per row, 1-indexed.
# Dense matrix CSV: one row per matrix row, entries "re:im" at 17 significant
# digits so 64-bit floats round-trip exactly.
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def write_graph_csv(g: Graph, path, weights: Mapping[Edge, complex] | None = None) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "re", "im"])
        for i, j in g.sorted_edges():
            w = complex(weights[(i, j)]) if weights is not None else 1 + 0j
            writer.writerow([i + 1, j + 1, _fmt(w.real), _fmt(w.imag)])


def read_graph_csv(path, n: int | None = None, field_tag: Field = Field.COMPLEX):
    """Read a graph CSV; returns (Graph, {edge: weight}).

    Node count defaults to the largest index seen. The im column is ignored
    in real mode.
    """
    edges = {}
    max_node = 0
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["i", "j"]:
            raise ConfigError(f"{path}: expected header 'i,j,re,im'")
        for lineno, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            try:
                i, j = int(row[0]), int(row[1])
                re = float(row[2]) if len(row) > 2 else 1.0
                im = float(row[3]) if len(row) > 3 else 0.0
            except (ValueError, IndexError) as exc:
                raise ConfigError(f"{path}:{lineno}: malformed edge row {row!r}") from exc
            if i < 1 or j < 1:
                raise ConfigError(f"{path}:{lineno}: indices are 1-based, got ({i},{j})")
            if i == j:
                raise ConfigError(f"{path}:{lineno}: self-loop ({i},{j})")
            a, b = min(i, j) - 1, max(j, i) - 1
            if (a, b) in edges:
                raise ConfigError(f"{path}:{lineno}: duplicate edge ({i},{j})")
            edges[(a, b)] = complex(re, 0.0 if field_tag is Field.REAL else im)
            max_node = max(max_node, i, j)
    n = max_node if n is None else n
    if max_node > n:
        raise ConfigError(f"{path}: edge index {max_node} exceeds n={n}")
    return Graph(n, frozenset(edges)), edges


def write_matrix_csv(values: np.ndarray, path) -> None:
    arr = np.asarray(values)
    with open(path, "w", newline="") as fh:
        for row in np.atleast_2d(arr):
            fh.write(",".join(f"{_fmt(np.real(v))}:{_fmt(np.imag(v))}" for v in row))
            fh.write("\n")


def read_matrix_csv(path, field_tag: Field) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            row = []
            for cell in line.split(","):
                try:
                    re_s, im_s = cell.split(":")
                    row.append(complex(float(re_s), float(im_s)))
                except ValueError as exc:
                    raise ConfigError(f"{path}:{lineno}: malformed entry {cell!r}") from exc
            rows.append(row)
    if not rows:
        raise ConfigError(f"{path}: empty matrix file")
    if len({len(r) for r in rows}) != 1:
        raise ConfigError(f"{path}: ragged rows")
    arr = np.array(rows, dtype=np.complex128)
    return _as_field_array(arr, field_tag)
