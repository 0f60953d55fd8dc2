"""Variance-ratio-optimal projections.

The informativeness of a direction v is the gain vᵀΣ₁v / vᵀΣ₂v: how much
more variance the relation-preserving distribution has along v than the
relation-breaking one. Whitening Σ₂ turns the maximization into an
ordinary symmetric eigenproblem, so the top directions come out of one
eigendecomposition. Near-zero eigenvalues of Σ₂ (linear dependencies in
the data) are floored relative to the largest eigenvalue to keep gains
bounded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from corand.dataset import Dataset

DEFAULT_EPS_REL = 1e-8


@dataclass(frozen=True, eq=False)
class WhiteningResult:
    w_matrix: np.ndarray  # W with Wᵀ·Σ₂_regularized·W = I
    clamped_count: int  # eigenvalues floored at eps_rel·λ_max
    regularized: np.ndarray  # Σ₂ with floored spectrum


@dataclass(frozen=True, eq=False)
class ProjectionBasis:
    directions: np.ndarray  # (k, m), unit-norm, sign-normalized
    gains: np.ndarray  # (k,), descending
    whitening: WhiteningResult


@dataclass(frozen=True, eq=False)
class ViewResult:
    directions: np.ndarray  # (2, m)
    gains: np.ndarray  # (2,)
    coords: np.ndarray  # (n, 2)
    axis_labels: list[list[str]]  # per direction, top-5 |weight| names


def gain(v: np.ndarray, sigma1: np.ndarray, sigma2: np.ndarray) -> float:
    """vᵀΣ₁v / vᵀΣ₂v. Scale-invariant in v."""
    v = np.asarray(v, dtype=np.float64)
    if not np.any(v):
        raise ValueError("gain is undefined for the zero vector")
    num = float(v @ sigma1 @ v)
    den = float(v @ sigma2 @ v)
    if not den > 0.0:
        raise ZeroDivisionError("denominator variance is zero along this direction")
    return num / den


def whiten(sigma2: np.ndarray, eps_rel: float = DEFAULT_EPS_REL) -> WhiteningResult:
    """W = U·diag(1/√λ_floored) from the eigendecomposition of Σ₂,
    with each eigenvalue floored at eps_rel·λ_max."""
    s2 = np.asarray(sigma2, dtype=np.float64)
    lam, u = np.linalg.eigh((s2 + s2.T) / 2.0)
    lam_max = lam.max()
    if not lam_max > 0.0:
        raise ValueError("cannot whiten a numerically zero matrix")
    floor = eps_rel * lam_max
    clamped = int((lam < floor).sum())
    lam_floored = np.maximum(lam, floor)
    w = u * (1.0 / np.sqrt(lam_floored))[None, :]
    regularized = (u * lam_floored[None, :]) @ u.T
    return WhiteningResult(w_matrix=w, clamped_count=clamped, regularized=regularized)


def _sign_normalize(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    return -v if v[k] < 0 else v


def optimal_directions(
    sigma1: np.ndarray,
    sigma2: np.ndarray,
    count: int = 2,
    eps_rel: float = DEFAULT_EPS_REL,
) -> ProjectionBasis:
    """Top `count` directions of the whitened problem, by descending gain.

    Each direction is W·w for an eigenvector w of WᵀΣ₁W; the reported
    gain is the matching eigenvalue (the gain is scale-invariant, so
    unit-normalizing the direction for display does not change it).
    Near-equal eigenvalues are ordered lexicographically by the
    sign-normalized entries; the choice within an eigenspace is
    arbitrary but deterministic.
    """
    wres = whiten(sigma2, eps_rel)
    w = wres.w_matrix
    mid = w.T @ np.asarray(sigma1, dtype=np.float64) @ w
    lam, vecs = np.linalg.eigh((mid + mid.T) / 2.0)
    order = list(np.argsort(-lam, kind="stable"))
    # Deterministic tie-break inside (near-)degenerate eigenspaces.
    tol = 1e-12 * max(abs(lam.max()), 1.0)
    for a in range(len(order) - 1):
        b = a + 1
        if abs(lam[order[a]] - lam[order[b]]) <= tol:
            va = tuple(_sign_normalize(w @ vecs[:, order[a]]))
            vb = tuple(_sign_normalize(w @ vecs[:, order[b]]))
            if vb < va:
                order[a], order[b] = order[b], order[a]

    count = min(count, len(order))
    dirs, gains = [], []
    for idx in order[:count]:
        v = w @ vecs[:, idx]
        v = v / np.linalg.norm(v)
        dirs.append(_sign_normalize(v))
        gains.append(lam[idx])
    return ProjectionBasis(
        directions=np.array(dirs), gains=np.array(gains), whitening=wres
    )


def top_weight_labels(
    direction: np.ndarray, names: list[str], k: int = 5
) -> list[str]:
    order = np.argsort(-np.abs(direction), kind="stable")
    return [names[i] for i in order[:k]]


def project(d: Dataset, basis: ProjectionBasis) -> ViewResult:
    """Coordinates of the data in the top-2 directions plus axis labels."""
    dirs = basis.directions
    if dirs.shape[1] != d.n_cols:
        raise ValueError("direction length does not match dataset width")
    if dirs.shape[0] < 2:
        dirs = np.vstack([dirs, dirs[-1]])
        gains = np.concatenate([basis.gains, basis.gains[-1:]])
    else:
        dirs = dirs[:2]
        gains = basis.gains[:2]
    coords = d.values @ dirs.T
    labels = [top_weight_labels(v, d.column_names) for v in dirs]
    return ViewResult(directions=dirs, gains=gains, coords=coords, axis_labels=labels)
