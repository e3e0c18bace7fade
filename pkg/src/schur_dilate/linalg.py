"""Dense complex matrix kernel.

All operators in this package are plain ``numpy`` arrays of ``complex128``.
Tensor products put the ancilla on the FIRST (slow) factor throughout:
``kron(P, rho)`` lays out ``P``-indexed blocks each holding a copy of
``rho``, and ``ptrace_first`` undoes exactly that layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian, NotPSD


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared across the library.

    psd_tol    relative eigenvalue tolerance for positivity and symmetry checks
    rank_tol   relative singular-value cutoff for pseudoinverses; ``None``
               selects ``max(rows, cols) * machine epsilon``
    recon_tol  Frobenius tolerance for parametrization round-trips
    """

    psd_tol: float = 1e-10
    rank_tol: float | None = None
    recon_tol: float = 1e-8

    def __post_init__(self):
        if self.psd_tol <= 0 or self.recon_tol <= 0:
            raise ValueError("tolerances must be strictly positive")
        if self.rank_tol is not None and self.rank_tol <= 0:
            raise ValueError("rank_tol must be strictly positive or None")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class PsdResult:
    """Outcome of a positivity test; truthy iff the matrix is PSD."""

    ok: bool
    min_eigenvalue: float

    def __bool__(self) -> bool:
        return self.ok


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if m.size and not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return (a + dagger(a)) / 2


def frob(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def opnorm(a: np.ndarray) -> float:
    """Operator 2-norm (largest singular value)."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def _check_hermitian(a: np.ndarray, tol: Tolerances) -> None:
    dev = frob(a - dagger(a))
    if dev > tol.psd_tol * max(1.0, frob(a)):
        raise NotHermitian(f"symmetry deviation {dev:.3e} exceeds tolerance")


def herm_eig(a, tol: Tolerances = DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues real and sorted
    in descending order, eigenvectors unitary columnwise, and
    ``a = V diag(w) V*``.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"square matrix required, got {a.shape}")
    _check_hermitian(a, tol)
    try:
        w, v = np.linalg.eigh(hermitian_part(a))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    return w[::-1].copy(), v[:, ::-1].copy()


def sqrt_psd(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Unique positive square root of a Hermitian PSD matrix.

    Eigenvalues in ``[-psd_tol * ||a||, 0)`` are rounding noise and clamp
    to zero; anything more negative raises ``NotPSD``.
    """
    a = as_matrix(a)
    w, v = herm_eig(a, tol)
    floor = -tol.psd_tol * max(1.0, opnorm(a))
    if w.size and w.min() < floor:
        raise NotPSD(f"eigenvalue {w.min():.3e} below tolerance {floor:.3e}")
    w = np.clip(w, 0.0, None)
    return hermitian_part((v * np.sqrt(w)) @ dagger(v))


def pinv(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse with a relative rank cutoff."""
    a = as_matrix(a)
    if a.size == 0:
        return np.zeros((a.shape[1], a.shape[0]), dtype=complex)
    rcond = tol.rank_tol
    if rcond is None:
        rcond = max(a.shape) * np.finfo(float).eps
    try:
        return np.linalg.pinv(a, rcond=rcond)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc


def is_psd(a, tol: Tolerances = DEFAULT_TOL) -> PsdResult:
    """Positivity test; reports the minimum eigenvalue either way."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"square matrix required, got {a.shape}")
    _check_hermitian(a, tol)
    w = np.linalg.eigvalsh(hermitian_part(a))
    min_eig = float(w[0]) if w.size else 0.0
    scale = max(float(np.abs(w).max()) if w.size else 0.0, 1.0)
    return PsdResult(ok=min_eig >= -tol.psd_tol * scale, min_eigenvalue=min_eig)


def kron(a, b) -> np.ndarray:
    """Tensor product with the first factor as the slow (ancilla) index."""
    return np.kron(as_matrix(a), as_matrix(b))


def ptrace_first(x, k: int, n: int) -> np.ndarray:
    """Trace out the first (ancilla) factor of an operator on C^k (x) C^n."""
    x = as_matrix(x)
    if x.shape != (k * n, k * n):
        raise DimensionMismatch(f"expected shape {(k * n, k * n)}, got {x.shape}")
    return np.einsum("aiaj->ij", x.reshape(k, n, k, n))
