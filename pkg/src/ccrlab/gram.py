"""Hermitian Gram matrices of indefinite inner products, with eigen-signature."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITICITY_TOL = 1e-12
SIGNATURE_TOL_FACTOR = 1e-9


@dataclass
class GramMatrix:
    """Gram matrix of a finite vector family under an indefinite product.

    ``signature`` counts eigenvalues above, below, and within the zero
    tolerance; ``det_exact`` is set only when the entries were assembled in
    exact arithmetic.
    """

    entries: np.ndarray
    signature: tuple[int, int, int]
    eigenvalues: np.ndarray | None = None
    det_exact: object | None = None

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]


def gram_signature(
    entries: np.ndarray, tol_factor: float = SIGNATURE_TOL_FACTOR
) -> tuple[tuple[int, int, int], np.ndarray]:
    """Eigen-signature (n+, n-, n0) of a Hermitian matrix.

    The zero tolerance is ``tol_factor`` times the spectral radius.  Raises if
    the input fails hermiticity beyond HERMITICITY_TOL (relative).
    """
    entries = np.asarray(entries, dtype=complex)
    if entries.size == 0:
        return (0, 0, 0), np.array([])
    scale = max(1.0, float(np.abs(entries).max()))
    defect = float(np.abs(entries - entries.conj().T).max())
    if defect > HERMITICITY_TOL * scale:
        raise ValueError(f"matrix is not Hermitian: defect {defect:.3e} at scale {scale:.3e}")
    eigenvalues = np.linalg.eigvalsh((entries + entries.conj().T) / 2.0)
    radius = float(np.abs(eigenvalues).max()) if eigenvalues.size else 0.0
    tol = tol_factor * max(radius, np.finfo(float).tiny)
    n_pos = int((eigenvalues > tol).sum())
    n_neg = int((eigenvalues < -tol).sum())
    n_zero = eigenvalues.size - n_pos - n_neg
    return (n_pos, n_neg, n_zero), eigenvalues


def numerical_rank(entries: np.ndarray, rel_tol: float = 1e-8) -> tuple[int, np.ndarray]:
    """Rank by singular values relative to the largest one."""
    entries = np.asarray(entries, dtype=complex)
    if entries.size == 0:
        return 0, np.array([])
    singular = np.linalg.svd(entries, compute_uv=False)
    top = singular[0] if singular[0] > 0 else 1.0
    return int((singular > rel_tol * top).sum()), singular
