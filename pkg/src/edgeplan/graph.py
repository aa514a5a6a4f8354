"""Filter activation graph and normalized-cut bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import FilterPartition, ValidationError


@dataclass(frozen=True, eq=False)
class ActivationMatrix:
    """Per-sample average activity of each filter, shape (samples, filters)."""

    values: np.ndarray
    samples: tuple[str, ...] | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ValidationError(f"activation matrix must be 2-D, got shape {v.shape}")
        if v.shape[0] < 1:
            raise ValidationError("activation matrix needs at least one sample")
        if v.shape[1] < 2:
            raise ValidationError(f"need at least 2 filters, got {v.shape[1]}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("activation matrix contains non-finite entries")
        if np.any(v < 0):
            r, c = np.argwhere(v < 0)[0]
            raise ValidationError(f"negative activity at sample {r}, filter {c}")
        if self.samples is not None and len(self.samples) != v.shape[0]:
            raise ValidationError("sample labels do not match row count")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_filters(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, ActivationMatrix):
            return NotImplemented
        return self.samples == other.samples and np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class FilterGraph:
    weights: np.ndarray
    degrees: np.ndarray

    @property
    def M(self) -> int:
        return self.weights.shape[0]

    @classmethod
    def from_weights(cls, weights) -> "FilterGraph":
        A = np.array(weights, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValidationError(f"weights must be square, got shape {A.shape}")
        if not np.all(np.isfinite(A)) or np.any(A < 0):
            raise ValidationError("weights must be finite and non-negative")
        if not np.array_equal(A, A.T):
            raise ValidationError("weights must be symmetric")
        if np.any(np.diag(A) != 0):
            raise ValidationError("weights must have a zero diagonal")
        A.setflags(write=False)
        z = A.sum(axis=1)
        z.setflags(write=False)
        return cls(A, z)


def build_filter_graph(acts: ActivationMatrix, chunk: int = 64) -> FilterGraph:
    """Edge weight between filters m, m' is the sum over samples of
    a_m * a_m' * |a_m - a_m'|."""
    X = acts.values
    if X.shape[1] < 2:
        raise ValidationError("need at least 2 filters")
    M = X.shape[1]
    A = np.zeros((M, M))
    for start in range(0, X.shape[0], chunk):
        B = X[start:start + chunk]
        A += np.einsum("vi,vj,vij->ij", B, B, np.abs(B[:, :, None] - B[:, None, :]))
    # Exact symmetry: floating sums of a_i a_j |.| and a_j a_i |.| can differ in order.
    A = np.triu(A, 1)
    A = A + A.T
    return FilterGraph.from_weights(A)


def _index_set(g: FilterGraph, P: Iterable[int]) -> np.ndarray:
    idx = np.array(sorted(set(int(i) for i in P)), dtype=int)
    if idx.size and (idx[0] < 0 or idx[-1] >= g.M):
        raise ValidationError(f"filter index out of range 0..{g.M - 1}")
    return idx


def cut_weight(g: FilterGraph, P: Iterable[int], Q: Iterable[int]) -> float:
    p, q = _index_set(g, P), _index_set(g, Q)
    overlap = np.intersect1d(p, q)
    if overlap.size:
        raise ValidationError(f"cut sets overlap on filters {overlap.tolist()}")
    if p.size == 0 or q.size == 0:
        return 0.0
    return float(g.weights[np.ix_(p, q)].sum())


def volume(g: FilterGraph, P: Iterable[int]) -> float:
    return float(g.degrees[_index_set(g, P)].sum())


def ncut_value(g: FilterGraph, partitions: Sequence[FilterPartition | Iterable[int]]) -> float:
    """Half the sum, over blocks, of cut-to-complement divided by block volume."""
    blocks = [_index_set(g, getattr(p, "members", p)) for p in partitions]
    seen = np.concatenate(blocks) if blocks else np.array([], dtype=int)
    if len(seen) != len(set(seen.tolist())):
        raise ValidationError("partitions are not disjoint")
    if set(seen.tolist()) != set(range(g.M)):
        raise ValidationError("partitions do not cover every filter")
    total = 0.0
    for k, b in enumerate(blocks):
        vol = float(g.degrees[b].sum())
        if vol <= 0:
            raise ValidationError(f"partition {k} has zero volume (isolated block)")
        inside = float(g.weights[np.ix_(b, b)].sum())
        total += (vol - inside) / vol
    return 0.5 * total


def edge_list(g: FilterGraph) -> list[tuple[int, int, float]]:
    """Non-zero edges (i < j) for inspection."""
    i, j = np.nonzero(np.triu(g.weights, 1))
    return [(int(a), int(b), float(g.weights[a, b])) for a, b in zip(i, j)]
