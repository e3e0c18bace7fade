"""Defect operators, the Julia unitary completion, and contractive factor solves.

For a contraction ``T`` the defect operators are

    D_T  = (I - T*T)^(1/2)        square on the domain,
    D_T* = (I - TT*)^(1/2)        square on the codomain,

and ``[[T, D_T*], [D_T, -T*]]`` is unitary.  The two solve operations
realize the closed-form factorizations ``Gamma = Y X^+`` that every
parametrization in this package is built from: the pseudoinverse extends
the factor by zero off the closed range, which is also the normalization
making Gamma unique.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoFactor, NotContraction, NotEquinormed
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    dagger,
    frob,
    herm_eig,
    hermitian_part,
    opnorm,
    pinv,
)

# Slack allowed on extracted factors before clipping; beyond it the solve
# is declared infeasible.
CLIP_SLACK = 1e-9


@dataclass(frozen=True)
class DefectPair:
    """Both defect operators of one contraction."""

    d_t: np.ndarray
    d_t_star: np.ndarray


@dataclass(frozen=True)
class PartialIsometryFactor:
    """Partial isometry V with V X = Y, vanishing off the initial space."""

    v: np.ndarray
    initial_rank: int


def _defect_root(gram: np.ndarray, tol: Tolerances) -> np.ndarray:
    """Positive root of I - gram with eigenvalues in [-psd_tol, psd_tol] -> 0.

    Singular values of the contraction within tolerance of 1 are treated as
    exactly 1; without the symmetric clamp, float noise of order eps in the
    Gram matrix would surface as sqrt(eps) in the defect.
    """
    w, v = herm_eig(gram, tol)
    if w.size and w.min() < -tol.psd_tol * max(1.0, opnorm(gram) + 1.0):
        raise NotContraction(
            f"operator norm exceeds 1 (defect eigenvalue {w.min():.3e})"
        )
    w = np.where(np.abs(w) <= tol.psd_tol, 0.0, np.clip(w, 0.0, None))
    return hermitian_part((v * np.sqrt(w)) @ dagger(v))


def defect(t, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """D_T, square of side cols(T)."""
    t = as_matrix(t)
    return _defect_root(np.eye(t.shape[1]) - dagger(t) @ t, tol)


def defect_star(t, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """D_T*, square of side rows(T)."""
    t = as_matrix(t)
    return _defect_root(np.eye(t.shape[0]) - t @ dagger(t), tol)


def check_contraction(t, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    t = as_matrix(t)
    norm = opnorm(t)
    if norm > 1.0 + tol.psd_tol:
        raise NotContraction(f"operator norm {norm:.12f} exceeds 1")
    return t


def clip_to_contraction(g: np.ndarray, slack: float = CLIP_SLACK) -> np.ndarray:
    """Clip singular values in (1, 1 + slack] to exactly 1.

    Values beyond the slack are a real violation and raise ``NotContraction``.
    """
    if g.size == 0:
        return g
    norm = opnorm(g)
    if norm <= 1.0:
        return g
    if norm > 1.0 + slack:
        raise NotContraction(f"operator norm {norm:.12e} exceeds 1 + {slack:.1e}")
    u, s, vh = np.linalg.svd(g, full_matrices=False)
    return (u * np.minimum(s, 1.0)) @ vh


def defects(t, tol: Tolerances = DEFAULT_TOL) -> DefectPair:
    """Both defect operators of a contraction."""
    t = check_contraction(t, tol)
    return DefectPair(d_t=defect(t, tol), d_t_star=defect_star(t, tol))


def julia(t, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Unitary completion [[T, D_T*], [D_T, -T*]] of a contraction."""
    t = check_contraction(t, tol)
    pair = defects(t, tol)
    return np.block([[t, pair.d_t_star], [pair.d_t, -dagger(t)]])


def solve_contraction_factor(x, y, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Contraction Gamma with Gamma X = Y, given Y*Y <= X*X.

    Gamma = Y X^+ vanishes on the orthogonal complement of the range of X.
    Raises ``NoFactor`` when no contractive factor exists (the solve leaves
    a residual, or its norm exceeds 1 beyond slack).
    """
    x = as_matrix(x, "x")
    y = as_matrix(y, "y")
    if x.shape[1] != y.shape[1]:
        raise ValueError(f"column counts differ: {x.shape} vs {y.shape}")
    g = y @ pinv(x, tol)
    residual = frob(g @ x - y)
    if residual > CLIP_SLACK * max(1.0, frob(y)):
        raise NoFactor(f"Y*Y <= X*X fails: solve residual {residual:.3e}")
    try:
        return clip_to_contraction(g)
    except NotContraction as exc:
        raise NoFactor(str(exc)) from exc


def solve_left_factor(x, y, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Contraction Gamma with X Gamma = Y, the mirror-image solve."""
    return dagger(solve_contraction_factor(dagger(as_matrix(x)), dagger(as_matrix(y)), tol))


def solve_partial_isometry(x, y, tol: Tolerances = DEFAULT_TOL) -> PartialIsometryFactor:
    """Partial isometry V with V X = Y, given X*X = Y*Y.

    The initial space is the closed range of X; ``initial_rank`` is its
    numerical dimension.
    """
    x = as_matrix(x, "x")
    y = as_matrix(y, "y")
    gx = dagger(x) @ x
    gy = dagger(y) @ y
    dev = frob(gx - gy)
    if dev > tol.psd_tol * max(1.0, frob(gx)):
        raise NotEquinormed(f"X*X and Y*Y differ by {dev:.3e}")
    v = y @ pinv(x, tol)
    s = np.linalg.svd(x, compute_uv=False)
    cutoff = (tol.rank_tol if tol.rank_tol is not None
              else max(x.shape) * np.finfo(float).eps)
    rank = int((s > cutoff * (s[0] if s.size else 1.0)).sum())
    return PartialIsometryFactor(v=v, initial_rank=rank)
