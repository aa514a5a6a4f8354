"""Spectral filter partitioning: normalized Laplacian, Jacobi eigensolver,
k-means on the embedding rows, and an exhaustive Ncut oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import FilterPartition, PlannerConfig, ValidationError
from .graph import FilterGraph


class EigenConvergenceError(RuntimeError):
    def __init__(self, residual: float, sweeps: int):
        super().__init__(
            f"Jacobi eigensolver did not converge in {sweeps} sweeps "
            f"(off-diagonal norm {residual:.3e})"
        )
        self.residual = residual
        self.sweeps = sweeps


def normalized_laplacian(g: FilterGraph) -> np.ndarray:
    z = g.degrees
    isolated = np.flatnonzero(z <= 0)
    if isolated.size:
        raise ValidationError(
            f"filter {int(isolated[0])} has zero degree (isolated node); "
            "the normalized Laplacian is undefined"
        )
    inv_sqrt = 1.0 / np.sqrt(z)
    L = np.eye(g.M) - inv_sqrt[:, None] * g.weights * inv_sqrt[None, :]
    return 0.5 * (L + L.T)


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairings covering every (p, q) once per sweep, pairs disjoint within a round."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a >= 0 and b >= 0:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(S: np.ndarray, tol: float = 1e-10, max_sweeps: int = 100):
    """Eigen-decomposition of a dense symmetric matrix by cyclic Jacobi rotations.

    Each sweep visits all index pairs in round-robin order; the rotations of a
    round act on disjoint pairs, so they commute and are applied together.
    Iterates until the off-diagonal Frobenius norm is at most ``tol``.

    Returns ``(eigenvalues, eigenvectors)`` unsorted, with ``S ~ V diag(w) V^T``.
    """
    A = np.array(S, dtype=float)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n:
        raise ValidationError("matrix must be square")
    V = np.eye(n)
    if n == 1:
        return A.diagonal().copy(), V
    rounds = _round_robin(n)

    mask = ~np.eye(n, dtype=bool)

    def off(a):
        # Direct sum; ||A||^2 - ||diag||^2 cancels to ~sqrt(eps) * ||A||.
        return float(np.sqrt(np.sum(a[mask] ** 2)))

    err = off(A)
    sweeps = 0
    while err > tol:
        if sweeps >= max_sweeps:
            raise EigenConvergenceError(err, sweeps)
        for P, Q in rounds:
            apq = A[P, Q]
            active = apq != 0.0
            if not active.any():
                continue
            P, Q, apq = P[active], Q[active], apq[active]
            theta = (A[Q, Q] - A[P, P]) / (2.0 * apq)
            with np.errstate(over="ignore"):
                # Huge theta gives t ~ 1/(2 theta); overflow to t = 0 just drops a negligible entry.
                t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t[theta == 0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            rp, rq = A[P, :], A[Q, :]
            A[P, :] = c[:, None] * rp - s[:, None] * rq
            A[Q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = A[:, P], A[:, Q]
            A[:, P] = cp * c - cq * s
            A[:, Q] = cp * s + cq * c
            A[P, Q] = 0.0
            A[Q, P] = 0.0
            vp, vq = V[:, P], V[:, Q]
            V[:, P] = vp * c - vq * s
            V[:, Q] = vp * s + vq * c
        sweeps += 1
        err = off(A)
    return A.diagonal().copy(), V


@dataclass(frozen=True, eq=False)
class SpectralEmbedding:
    H: np.ndarray
    eigenvalues: np.ndarray


def _fix_signs(V: np.ndarray) -> np.ndarray:
    V = V.copy()
    for k in range(V.shape[1]):
        # argmax returns the first index among exact ties.
        i = int(np.argmax(np.abs(V[:, k])))
        if V[i, k] < 0:
            V[:, k] = -V[:, k]
    return V


def smallest_k_eigen(Lsym: np.ndarray, K: int, tol: float = 1e-10) -> SpectralEmbedding:
    """The K smallest eigenpairs of a symmetric matrix, ascending, sign-fixed."""
    M = Lsym.shape[0]
    if not 1 <= K <= M:
        raise ValidationError(f"K must lie in 1..{M}, got {K}")
    if not np.allclose(Lsym, Lsym.T, rtol=0, atol=1e-12):
        raise ValidationError("matrix is not symmetric")
    w, V = jacobi_eigh(Lsym, tol=tol)
    order = np.argsort(w, kind="stable")[:K]
    H = _fix_signs(V[:, order])
    vals = w[order]
    residual = np.max(np.abs(Lsym @ H - H * vals[None, :]), axis=0)
    # Floor at 1e-12: below that the check measures rounding, not convergence.
    worst = float(residual.max())
    if worst > max(tol, 1e-12):
        raise EigenConvergenceError(worst, -1)
    return SpectralEmbedding(H, vals)


def _kmeans_pp_init(X: np.ndarray, K: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = [X[int(rng.integers(n))]]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for _ in range(1, K):
        total = d2.sum()
        if total > 0:
            i = int(rng.choice(n, p=d2 / total))
        else:
            i = int(rng.integers(n))
        centers.append(X[i])
        d2 = np.minimum(d2, np.sum((X - X[i]) ** 2, axis=1))
    return np.array(centers)


def _sq_dists(X, C):
    return np.sum((X[:, None, :] - C[None, :, :]) ** 2, axis=2)


def _repair_empty(X, labels, centers, K):
    counts = np.bincount(labels, minlength=K)
    while (counts == 0).any():
        empty = int(np.flatnonzero(counts == 0)[0])
        big = int(np.argmax(counts))
        idx = np.flatnonzero(labels == big)
        far = idx[int(np.argmax(np.sum((X[idx] - centers[big]) ** 2, axis=1)))]
        labels[far] = empty
        centers[empty] = X[far]
        counts = np.bincount(labels, minlength=K)
    return labels


def _lloyd(X, centers, K, max_iters):
    labels = np.argmin(_sq_dists(X, centers), axis=1)
    for _ in range(max_iters):
        labels = _repair_empty(X, labels, centers, K)
        centers = np.array([X[labels == k].mean(axis=0) for k in range(K)])
        new = np.argmin(_sq_dists(X, centers), axis=1)
        if np.array_equal(new, labels):
            break
        labels = new
    labels = _repair_empty(X, labels, centers, K)
    centers = np.array([X[labels == k].mean(axis=0) for k in range(K)])
    inertia = float(np.sum((X - centers[labels]) ** 2))
    return labels, inertia


def _canonical(labels: np.ndarray) -> np.ndarray:
    """Relabel clusters in order of first appearance."""
    mapping: dict[int, int] = {}
    out = np.empty_like(labels)
    for i, lab in enumerate(labels):
        out[i] = mapping.setdefault(int(lab), len(mapping))
    return out


def kmeans_rows(
    H: np.ndarray, K: int, seed: int = 0, restarts: int = 10, max_iters: int = 100
) -> np.ndarray:
    """Cluster the rows of ``H`` into K non-empty clusters.

    Best inertia over ``restarts`` k-means++ starts drawn from one seeded
    stream. Labels are 0..K-1 in order of first appearance.
    """
    X = np.asarray(H, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if not 1 <= K <= n:
        raise ValidationError(f"K must lie in 1..{n}, got {K}")
    rng = np.random.default_rng(seed)
    best, best_inertia = None, np.inf
    for _ in range(restarts):
        centers = _kmeans_pp_init(X, K, rng)
        labels, inertia = _lloyd(X, centers, K, max_iters)
        if inertia < best_inertia:
            best, best_inertia = labels, inertia
    return _canonical(best)


def labels_to_partitions(labels) -> list[FilterPartition]:
    labels = np.asarray(labels)
    K = int(labels.max()) + 1
    parts = [FilterPartition(tuple(int(i) for i in np.flatnonzero(labels == k))) for k in range(K)]
    return sorted(parts, key=lambda p: p.members[0])


def partition_filters(g: FilterGraph, K: int, cfg: PlannerConfig | None = None) -> list[FilterPartition]:
    """Split the filters into K partitions by spectral clustering of the graph."""
    cfg = cfg or PlannerConfig()
    if not 1 <= K <= g.M:
        raise ValidationError(f"cannot split {g.M} filters into {K} partitions")
    if K == 1:
        return [FilterPartition(tuple(range(g.M)))]
    emb = smallest_k_eigen(normalized_laplacian(g), K, cfg.eigen_tolerance)
    H = emb.H
    if cfg.normalize_rows:
        norms = np.linalg.norm(H, axis=1, keepdims=True)
        H = H / np.where(norms > 0, norms, 1.0)
    labels = kmeans_rows(H, K, cfg.seed, cfg.kmeans_restarts, cfg.kmeans_max_iters)
    return labels_to_partitions(labels)


def exhaustive_min_ncut(g: FilterGraph, K: int):
    """Globally minimal Ncut over all K-partitions with non-empty blocks.

    Enumerates label vectors with filter 0 fixed to block 0; blocks with zero
    volume make a candidate inadmissible. Returns ``(partitions, value)``.
    """
    M = g.M
    if M > 12 or K > 3:
        raise ValidationError(f"instance too large for enumeration (M={M}, K={K})")
    if not 1 <= K <= M:
        raise ValidationError(f"K must lie in 1..{M}, got {K}")
    if K == 1:
        return [FilterPartition(tuple(range(M)))], 0.0
    tails = np.array(list(itertools.product(range(K), repeat=M - 1)), dtype=int)
    labels = np.hstack([np.zeros((len(tails), 1), dtype=int), tails])
    A, z = g.weights, g.degrees
    total = np.zeros(len(labels))
    valid = np.ones(len(labels), dtype=bool)
    for k in range(K):
        X = (labels == k).astype(float)
        vol = X @ z
        inside = np.einsum("ni,ij,nj->n", X, A, X)
        valid &= (X.sum(axis=1) > 0) & (vol > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            total += np.where(vol > 0, (vol - inside) / np.where(vol > 0, vol, 1.0), 0.0)
    if not valid.any():
        raise ValidationError("no admissible partition (zero-volume blocks everywhere)")
    values = np.where(valid, 0.5 * total, np.inf)
    best = int(np.argmin(values))
    return labels_to_partitions(labels[best]), float(values[best])
