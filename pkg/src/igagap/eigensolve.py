"""Generalized symmetric-definite eigenproblem ``K u = lambda M u``.

The pencil is reduced with a Cholesky factor of M and the resulting dense
symmetric matrix is handed to LAPACK (Householder tridiagonalization plus
implicit QL/QR).  M^{-1} K is never formed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import linalg

from .assembly import QuadratureConfig, SymmetricBandedMatrix, assemble_pencil
from .errors import DefinitenessError, DomainError, NumericalError

__all__ = ("Spectrum", "generalized_eig", "solve_pencil", "compute_spectrum")

MatrixLike = Union[SymmetricBandedMatrix, np.ndarray]


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues of one discretization.

    Attributes
    ----------
    p, n : int
        Degree and number of spans; ``len(eigenvalues) == n + p - 2``.
    phi_label : str
    eigenvalues : numpy.ndarray
        Strictly positive, ascending.
    eigenvectors : numpy.ndarray or None
        M-orthonormal columns, column k paired with ``eigenvalues[k]``.
    """

    p: int
    n: int
    phi_label: str
    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None

    @property
    def size(self) -> int:
        return len(self.eigenvalues)

    @property
    def normalized(self) -> np.ndarray:
        """``lambda_k / n**2``."""
        return self.eigenvalues / float(self.n) ** 2

    @property
    def sqrt_eigenvalues(self) -> np.ndarray:
        return np.sqrt(self.eigenvalues)

    @property
    def sqrt_normalized(self) -> np.ndarray:
        return np.sqrt(self.normalized)


def _dense(a: MatrixLike) -> np.ndarray:
    if isinstance(a, SymmetricBandedMatrix):
        return a.to_dense()
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    return a


def generalized_eig(K: MatrixLike, M: MatrixLike, want_vectors: bool = False):
    """Eigenvalues (and optionally vectors) of the pencil (K, M).

    Parameters
    ----------
    K, M : SymmetricBandedMatrix or array_like
        Symmetric matrices of equal order; M must be positive definite.
    want_vectors : bool
        Also return M-orthonormal eigenvectors.

    Returns
    -------
    w : numpy.ndarray
        Ascending eigenvalues.
    v : numpy.ndarray or None
        Eigenvectors as columns, or None.

    Raises
    ------
    DefinitenessError
        If the Cholesky factorization of M breaks down.
    NumericalError
        If the symmetric eigensolver fails to converge.
    """
    k = _dense(K)
    m = _dense(M)
    if k.shape != m.shape:
        raise DomainError(f"pencil matrices differ in shape: {k.shape} vs {m.shape}")
    if k.shape[0] == 0:
        return np.zeros(0), (np.zeros((0, 0)) if want_vectors else None)
    try:
        L = linalg.cholesky(m, lower=True, check_finite=True)
    except linalg.LinAlgError as exc:
        raise DefinitenessError(f"mass matrix is not positive definite: {exc}") from exc
    # C = L^{-1} K L^{-T}
    tmp = linalg.solve_triangular(L, k, lower=True)
    c = linalg.solve_triangular(L, tmp.T, lower=True)
    c = 0.5 * (c + c.T)
    try:
        if want_vectors:
            w, y = linalg.eigh(c, driver="ev")
            v = linalg.solve_triangular(L, y, lower=True, trans="T")
        else:
            w = linalg.eigh(c, eigvals_only=True, driver="ev")
            v = None
    except linalg.LinAlgError as exc:
        raise NumericalError(f"symmetric eigensolver did not converge: {exc}") from exc
    return w, v


def solve_pencil(
    K: MatrixLike,
    M: MatrixLike,
    p: int,
    n: int,
    phi_label: str = "",
    want_vectors: bool = False,
) -> Spectrum:
    """Wrap `generalized_eig` into a `Spectrum`, checking positivity."""
    w, v = generalized_eig(K, M, want_vectors)
    if w.size and not w[0] > 0.0:
        raise NumericalError(f"nonpositive eigenvalue {w[0]:.3g} for an SPD pencil")
    w.setflags(write=False)
    return Spectrum(int(p), int(n), phi_label, w, v)


def compute_spectrum(phi, p: int, n: int, quad: Optional[QuadratureConfig] = None,
                     want_vectors: bool = False) -> Spectrum:
    """Assemble the pencil for (phi, p, n) and solve it."""
    M, K = assemble_pencil(phi, p, n, quad)
    return solve_pencil(K, M, p, n, phi.label, want_vectors)
