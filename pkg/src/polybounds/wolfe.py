"""Wolfe's minimum-norm-point algorithm over a finite point set's convex hull."""

from __future__ import annotations

import numpy as np

from .errors import ArgumentError


def _affine_minimizer(S: np.ndarray) -> np.ndarray:
    """Min-norm point of the affine hull of the rows of S.

    Solves the KKT system of min ||S^T a||^2 s.t. sum(a) = 1 via least
    squares, which tolerates rank-deficient corrals.
    """
    k = S.shape[0]
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = S @ S.T
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
    return sol[:k]


def min_norm_point(points, tol: float = 1e-10, max_iter: int = 1000) -> np.ndarray:
    """Point of minimum Euclidean norm in the convex hull of `points`.

    Wolfe's algorithm with the usual major/minor cycle structure; terminates
    when the optimality gap <x, x> - min_p <x, p> drops to `tol`, or earlier
    if no further numerical progress is possible.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.size == 0:
        raise ArgumentError("min_norm_point requires a nonempty point set")
    pts = np.unique(pts, axis=0)  # exact duplicates only waste corral slots
    norms2 = np.einsum("ij,ij->i", pts, pts)
    start = int(np.argmin(norms2))
    corral = [start]
    weights = np.array([1.0])
    x = pts[start].copy()

    for _ in range(max_iter):
        scores = pts @ x
        j = int(np.argmin(scores))
        gap = float(x @ x - scores[j])
        if gap <= tol or j in corral:
            break
        corral.append(j)
        weights = np.append(weights, 0.0)

        for _minor in range(len(pts) + 2):
            alpha = _affine_minimizer(pts[corral])
            if (alpha > 1e-12).all():
                weights = alpha
                break
            # step toward alpha as far as nonnegativity allows
            neg = alpha <= 1e-12
            denom = weights[neg] - alpha[neg]
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(denom > 0, weights[neg] / denom, 0.0)
            theta = min(1.0, max(0.0, float(ratios.min())))
            weights = (1.0 - theta) * weights + theta * alpha
            weights[neg & (weights <= 1e-14)] = 0.0
            if (weights > 0.0).all():
                # stalled without vanishing anyone: evict the worst offender
                weights[int(np.argmin(alpha))] = 0.0
            keep = weights > 0.0
            if not keep.any():
                corral = [corral[-1]]
                weights = np.array([1.0])
                break
            corral = [c for c, k in zip(corral, keep) if k]
            weights = weights[keep]
            weights = weights / weights.sum()
        x = weights @ pts[corral]

    return x
