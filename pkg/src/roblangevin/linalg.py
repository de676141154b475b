"""Dense linear-algebra kernels and seeded randomness.

Everything downstream (robust estimation, samplers, metrics) goes through
these wrappers so that tolerances and determinism live in one place.
Matrices are dense ``float64``; problem sizes stay at desk scale (d up to a
few hundred), so O(d^3) eigendecompositions are acceptable.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray


class LinalgError(ValueError):
    """Raised for non-finite, non-symmetric or non-PSD inputs."""


SYM_RTOL = 1e-10


def _as_symmetric(M: NDArray) -> NDArray:
    """Validate and symmetrize a square matrix.

    Accepts matrices symmetric to within ``SYM_RTOL`` relative Frobenius
    error and returns the exactly symmetric average (M + M^T) / 2.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise LinalgError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise LinalgError("matrix has non-finite entries")
    scale = np.linalg.norm(M)
    if np.linalg.norm(M - M.T) > SYM_RTOL * max(scale, 1.0):
        raise LinalgError("matrix is not symmetric within tolerance")
    return 0.5 * (M + M.T)


def sym_eig(M: NDArray) -> tuple[NDArray, NDArray]:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    Returns ``(values, vectors)`` with orthonormal eigenvectors in the
    columns of ``vectors``, satisfying ``M = V diag(values) V^T``. Ties keep
    the solver's deterministic output order.
    """
    M = _as_symmetric(M)
    w, V = np.linalg.eigh(M)
    return w[::-1].copy(), V[:, ::-1].copy()


def psd_sqrt(M: NDArray) -> NDArray:
    """Symmetric PSD square root, ``R @ R = M``.

    Eigenvalues in ``[-1e-10 * ||M||, 0)`` are treated as numerical noise
    and clamped to zero; anything more negative raises ``LinalgError``.
    """
    w, V = sym_eig(M)
    spectral = float(np.max(np.abs(w))) if w.size else 0.0
    if np.min(w) < -1e-10 * max(spectral, 1e-300):
        raise LinalgError(
            f"matrix is not PSD: min eigenvalue {np.min(w):g} "
            f"with spectral norm {spectral:g}"
        )
    w = np.clip(w, 0.0, None)
    R = (V * np.sqrt(w)) @ V.T
    return 0.5 * (R + R.T)


class RngHandle:
    """A single-owner random stream with reproducible child derivation.

    Identical seed + identical call sequence produces an identical stream.
    One handle must not be advanced from two threads; parallel work should
    derive independent children via :meth:`child`.
    """

    def __init__(self, seed: int, _key: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.key = _key
        self._gen = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=_key))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def child(self, *key: int) -> "RngHandle":
        """Derive an independent stream keyed by integers (e.g. cell, run)."""
        return RngHandle(self.seed, self.key + tuple(int(k) for k in key))


def gaussian_vector(rng: RngHandle | np.random.Generator, d: int) -> NDArray:
    """Draw a d-dimensional standard normal vector from the stream."""
    if d < 1:
        raise LinalgError(f"dimension must be >= 1, got {d}")
    gen = rng.generator if isinstance(rng, RngHandle) else rng
    return gen.standard_normal(d)
