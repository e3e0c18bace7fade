"""Extraction and reconstruction of contraction parameters.

A row contraction ``T = [T_1 ... T_n]`` is encoded by contractions
``Gamma_k`` through

    T_k = D_{Gamma_1*} ... D_{Gamma_{k-1}*} Gamma_k,

a column contraction by the mirror image ``T_k = Gamma_k D_{Gamma_{k-1}}
... D_{Gamma_1}``, and an n x m block contraction by nesting the two: each
block column is a column contraction, and consecutive block columns are
chained through the *triangular* factors of the accumulated defects rather
than their positive roots.  The triangular convention is what makes the
2 x 2 case collapse to the closed form

    [[G1,      D_{G1*} G2                      ],
     [G3 D_G1, -G3 G1* G2 + D_{G3*} G4 D_{G2}  ]].

Positive block matrices use the same machinery: diagonal blocks carry
positive roots ``L_ii``, the strictly upper triangle carries contractions
``Gamma_ij``, and the natural square root assembled from them is a block
Cholesky factor.

Extraction is total on (numerical) contractions: every solve is a
pseudoinverse solve, which picks the unique parameter vanishing off the
relevant range, and extracted factors with norm in ``(1, 1 + 1e-9]`` are
clipped back to the unit ball.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contraction import (
    check_contraction,
    clip_to_contraction,
    defect,
    defect_star,
    solve_contraction_factor,
    solve_left_factor,
)
from .errors import (
    DimensionMismatch,
    NoFactor,
    NotContraction,
    NotPSD,
    NotUnitary,
    ShapeUnsupported,
)
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    dagger,
    frob,
    hermitian_part,
    is_psd,
    pinv,
    sqrt_psd,
)


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


def _offsets(dims) -> list[int]:
    out = [0]
    for d in dims:
        out.append(out[-1] + d)
    return out


@dataclass(frozen=True)
class BlockShape:
    """Partition of the row and column index ranges into blocks."""

    row_dims: tuple[int, ...]
    col_dims: tuple[int, ...]

    def __post_init__(self):
        rd = tuple(int(d) for d in self.row_dims)
        cd = tuple(int(d) for d in self.col_dims)
        if not rd or not cd or min(rd) <= 0 or min(cd) <= 0:
            raise ValueError("block dimensions must be nonempty and positive")
        object.__setattr__(self, "row_dims", rd)
        object.__setattr__(self, "col_dims", cd)

    @property
    def rows(self) -> int:
        return sum(self.row_dims)

    @property
    def cols(self) -> int:
        return sum(self.col_dims)

    def check(self, a: np.ndarray) -> None:
        if a.shape != (self.rows, self.cols):
            raise DimensionMismatch(
                f"matrix shape {a.shape} does not match block shape "
                f"{self.row_dims} x {self.col_dims}"
            )


@dataclass(frozen=True)
class RowColParams:
    """Parameters of a row or column contraction."""

    orientation: str  # "row" | "column"
    gammas: tuple[np.ndarray, ...]
    shape: BlockShape

    def __post_init__(self):
        if self.orientation not in ("row", "column"):
            raise ValueError(f"unknown orientation {self.orientation!r}")
        object.__setattr__(self, "gammas", tuple(_freeze(g) for g in self.gammas))


@dataclass(frozen=True)
class MatrixContractionParams:
    """Grid of parameters for an n x m block contraction.

    ``gammas[i][j]`` has shape ``(row_dims[i], col_dims[j])`` and is the
    i-th column-parameter of the j-th block column.
    """

    gammas: tuple[tuple[np.ndarray, ...], ...]
    shape: BlockShape

    def __post_init__(self):
        object.__setattr__(
            self,
            "gammas",
            tuple(tuple(_freeze(g) for g in row) for row in self.gammas),
        )

    def column(self, j: int) -> tuple[np.ndarray, ...]:
        return tuple(self.gammas[i][j] for i in range(len(self.shape.row_dims)))


@dataclass(frozen=True)
class PositiveSCParams:
    """Diagonal positive roots plus the strictly upper triangle of contractions.

    ``diag_roots[i]`` is the positive square root of the i-th diagonal
    block; ``gamma(i, j)`` for ``i < j`` is the contraction coupling blocks
    i and j.
    """

    diag_roots: tuple[np.ndarray, ...]
    gammas: tuple[tuple[np.ndarray, ...], ...]  # gammas[i] = (G_{i,i+1}, ..., G_{i,n-1})
    shape: BlockShape

    def __post_init__(self):
        if self.shape.row_dims != self.shape.col_dims:
            raise ShapeUnsupported("positive block matrices need square blocks")
        object.__setattr__(self, "diag_roots", tuple(_freeze(r) for r in self.diag_roots))
        object.__setattr__(
            self,
            "gammas",
            tuple(tuple(_freeze(g) for g in row) for row in self.gammas),
        )

    @property
    def dims(self) -> tuple[int, ...]:
        return self.shape.row_dims

    def gamma(self, i: int, j: int) -> np.ndarray:
        if not 0 <= i < j < len(self.dims):
            raise IndexError(f"need 0 <= i < j < {len(self.dims)}, got ({i}, {j})")
        return self.gammas[i][j - i - 1]

    def row_contraction(self, k: int, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
        """Row contraction R_k rebuilt from the parameters right of block k."""
        return row_reconstruct(
            RowColParams(
                "row",
                self.gammas[k],
                BlockShape((self.dims[k],), self.dims[k + 1:]),
            ),
            tol,
        )


# ---------------------------------------------------------------------------
# row / column contractions


def _split_cols(t: np.ndarray, dims) -> list[np.ndarray]:
    off = _offsets(dims)
    return [t[:, off[k]:off[k + 1]] for k in range(len(dims))]


def _split_rows(t: np.ndarray, dims) -> list[np.ndarray]:
    off = _offsets(dims)
    return [t[off[k]:off[k + 1], :] for k in range(len(dims))]


def row_parametrize(t, shape: BlockShape, tol: Tolerances = DEFAULT_TOL) -> RowColParams:
    """Extract the parameters of a row contraction, one block column at a time."""
    t = check_contraction(as_matrix(t), tol)
    shape.check(t)
    if len(shape.row_dims) != 1:
        raise ShapeUnsupported("row contractions have a single block row")
    gammas = []
    dacc = np.eye(t.shape[0], dtype=complex)
    for blk in _split_cols(t, shape.col_dims):
        g = solve_left_factor(dacc, blk, tol)
        gammas.append(g)
        dacc = dacc @ defect_star(g, tol)
    return RowColParams("row", tuple(gammas), shape)


def row_reconstruct(params: RowColParams, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    if params.orientation != "row":
        raise ValueError("row_reconstruct needs row-oriented parameters")
    h = params.shape.rows
    dacc = np.eye(h, dtype=complex)
    blocks = []
    for g in params.gammas:
        check_contraction(g, tol)
        blocks.append(dacc @ g)
        dacc = dacc @ defect_star(g, tol)
    return np.hstack(blocks)


def col_parametrize(t, shape: BlockShape, tol: Tolerances = DEFAULT_TOL) -> RowColParams:
    """Column mirror of ``row_parametrize``: T_k = Gamma_k D_{G_{k-1}} ... D_{G_1}."""
    t = check_contraction(as_matrix(t), tol)
    shape.check(t)
    if len(shape.col_dims) != 1:
        raise ShapeUnsupported("column contractions have a single block column")
    gammas = []
    dacc = np.eye(t.shape[1], dtype=complex)
    for blk in _split_rows(t, shape.row_dims):
        g = solve_contraction_factor(dacc, blk, tol)
        gammas.append(g)
        dacc = defect(g, tol) @ dacc
    return RowColParams("column", tuple(gammas), shape)


def col_reconstruct(params: RowColParams, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    if params.orientation != "column":
        raise ValueError("col_reconstruct needs column-oriented parameters")
    w = params.shape.cols
    dacc = np.eye(w, dtype=complex)
    blocks = []
    for g in params.gammas:
        check_contraction(g, tol)
        blocks.append(g @ dacc)
        dacc = defect(g, tol) @ dacc
    return np.vstack(blocks)


def _row_lower_factor(gammas, tol: Tolerances) -> np.ndarray:
    """Block lower-triangular F with F F* = I - T*T for a row contraction.

    Diagonal blocks are D_{G_i}; below the diagonal sits
    -G_i* D_{G_{i-1}*} ... D_{G_{j+1}*} G_j.
    """
    n = len(gammas)
    cols = [g.shape[1] for g in gammas]
    blocks = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                blocks[i][j] = defect(gammas[i], tol)
            elif i > j:
                acc = dagger(gammas[i])
                for k in range(i - 1, j, -1):
                    acc = acc @ defect_star(gammas[k], tol)
                blocks[i][j] = -acc @ gammas[j]
            else:
                blocks[i][j] = np.zeros((cols[i], cols[j]))
    return np.block(blocks)


def _row_star_factor(gammas, h: int, tol: Tolerances) -> np.ndarray:
    """M = D_{G_1*} ... D_{G_n*} with M M* = I - T T* for a row contraction."""
    m = np.eye(h, dtype=complex)
    for g in gammas:
        m = m @ defect_star(g, tol)
    return m


def _col_star_lower_factor(gammas, tol: Tolerances) -> np.ndarray:
    """Block lower-triangular L with L L* = I - C C* for a column contraction."""
    n = len(gammas)
    rows = [g.shape[0] for g in gammas]
    blocks = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                blocks[i][j] = defect_star(gammas[i], tol)
            elif i > j:
                acc = gammas[i]
                for k in range(i - 1, j, -1):
                    acc = acc @ defect(gammas[k], tol)
                blocks[i][j] = -acc @ dagger(gammas[j])
            else:
                blocks[i][j] = np.zeros((rows[i], rows[j]))
    return np.block(blocks)


def _col_product_factor(gammas, w: int, tol: Tolerances) -> np.ndarray:
    """M = D_{G_1} ... D_{G_n} with M M* = I - C*C for a column contraction."""
    m = np.eye(w, dtype=complex)
    for g in gammas:
        m = m @ defect(g, tol)
    return m


def row_defect_factors(params: RowColParams, tol: Tolerances = DEFAULT_TOL):
    """Natural factors (F, M) with F F* = I - T*T and M M* = I - T T*.

    For row parameters F is block lower-triangular and M is the plain
    product of codomain defects; for column parameters the roles mirror.
    """
    gs = params.gammas
    if params.orientation == "row":
        return (_row_lower_factor(gs, tol), _row_star_factor(gs, params.shape.rows, tol))
    return (_col_product_factor(gs, params.shape.cols, tol), _col_star_lower_factor(gs, tol))


# ---------------------------------------------------------------------------
# n x m block contractions


def matrix_parametrize(t, shape: BlockShape, tol: Tolerances = DEFAULT_TOL) -> MatrixContractionParams:
    """Extract the parameter grid of an n x m block contraction.

    Block column k is solved against the product of the triangular defect
    factors of the previous column parameters, then parametrized as a
    column contraction.
    """
    t = check_contraction(as_matrix(t), tol)
    shape.check(t)
    col_shape_dims = shape.row_dims
    per_column = []
    dacc = np.eye(shape.rows, dtype=complex)
    off = _offsets(shape.col_dims)
    for k, d in enumerate(shape.col_dims):
        colblk = t[:, off[k]:off[k + 1]]
        ck = solve_left_factor(dacc, colblk, tol)
        col_params = col_parametrize(ck, BlockShape(col_shape_dims, (d,)), tol)
        per_column.append(col_params.gammas)
        dacc = dacc @ _col_star_lower_factor(col_params.gammas, tol)
    grid = tuple(
        tuple(per_column[j][i] for j in range(len(shape.col_dims)))
        for i in range(len(shape.row_dims))
    )
    return MatrixContractionParams(grid, shape)


def matrix_reconstruct(params: MatrixContractionParams, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    shape = params.shape
    dacc = np.eye(shape.rows, dtype=complex)
    cols = []
    for j, d in enumerate(shape.col_dims):
        gs = params.column(j)
        ck = col_reconstruct(RowColParams("column", gs, BlockShape(shape.row_dims, (d,))), tol)
        cols.append(dacc @ ck)
        dacc = dacc @ _col_star_lower_factor(gs, tol)
    return np.hstack(cols)


def matrix_defects_2x2(params: MatrixContractionParams, tol: Tolerances = DEFAULT_TOL):
    """Upper-triangular factors (G, H) with G*G = I - T*T and H*H = I - T T*.

    Only defined for 2 x 2 block parameters, where both factors have the
    closed forms built from single defects.
    """
    shape = params.shape
    if len(shape.row_dims) != 2 or len(shape.col_dims) != 2:
        raise ShapeUnsupported("2 x 2 block parameters required")
    g1 = params.gammas[0][0]
    g3 = params.gammas[1][0]
    g2 = params.gammas[0][1]
    g4 = params.gammas[1][1]
    h1, h2 = shape.col_dims
    k1, k2 = shape.row_dims
    d = lambda g: defect(g, tol)
    ds = lambda g: defect_star(g, tol)
    factor_t = np.block([
        [d(g3) @ d(g1), -d(g3) @ dagger(g1) @ g2 - dagger(g3) @ g4 @ d(g2)],
        [np.zeros((h2, h1)), d(g4) @ d(g2)],
    ])
    factor_t_star = np.block([
        [ds(g2) @ ds(g1), -ds(g2) @ g1 @ dagger(g3) - g2 @ dagger(g4) @ ds(g3)],
        [np.zeros((k2, k1)), ds(g4) @ ds(g3)],
    ])
    return factor_t, factor_t_star


# ---------------------------------------------------------------------------
# unitary matrices


def unitary_factorize(u, shape: BlockShape, tol: Tolerances = DEFAULT_TOL):
    """Split a block unitary as diag(I, G3) . julia(G1) . diag(I, G2).

    Requires square off-diagonal blocks.  G2 is recovered as the unitary
    polar factor of the (1,2) block; G3 = C D_{G1} - D G2* G1 is then
    automatically unitary because ``[D_{G1}, G1* G2]`` is a co-isometry.
    This closed form involves no rank decisions, so boundary cases
    (isometric corners, exact Julia operators) factor exactly.
    """
    u = as_matrix(u)
    shape.check(u)
    if len(shape.row_dims) != 2 or len(shape.col_dims) != 2:
        raise ShapeUnsupported("2 x 2 block shape required")
    k1, k2 = shape.row_dims
    h1, h2 = shape.col_dims
    if h2 != k1 or h1 != k2:
        raise ShapeUnsupported(
            f"off-diagonal blocks must be square, got {(k1, h2)} and {(k2, h1)}"
        )
    dev = frob(dagger(u) @ u - np.eye(u.shape[1]))
    if dev > 1e-10 * max(1.0, u.shape[0]):
        raise NotUnitary(f"unitarity deviation {dev:.3e}")
    a = u[:k1, :h1]
    b = u[:k1, h1:]
    c = u[k1:, :h1]
    d = u[k1:, h1:]
    g1 = a
    uu, _, vh = np.linalg.svd(b)
    g2 = uu @ vh
    g3 = c @ defect(a, tol) - d @ dagger(g2) @ a
    return g1, g2, g3


def unitary_reassemble(g1, g2, g3, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Inverse of ``unitary_factorize``: diag(I, G3) . julia(G1) . diag(I, G2)."""
    g1, g2, g3 = as_matrix(g1), as_matrix(g2), as_matrix(g3)
    da = defect(g1, tol)
    das = defect_star(g1, tol)
    middle = np.block([[g1, das], [da, -dagger(g1)]])
    p, q = g1.shape[0], g1.shape[1]
    left = np.block([
        [np.eye(p), np.zeros((p, q))],
        [np.zeros((q, p)), g3],
    ])
    right = np.block([
        [np.eye(q), np.zeros((q, p))],
        [np.zeros((p, q)), g2],
    ])
    return left @ middle @ right


# ---------------------------------------------------------------------------
# positive block matrices


def psd_parametrize(a, shape: BlockShape, tol: Tolerances = DEFAULT_TOL) -> PositiveSCParams:
    """Parametrize a positive block matrix, bottom-up over trailing corners.

    Maintains the block Cholesky factor of the trailing principal
    submatrix; each step above solves one row contraction against it, so
    the whole extraction costs one factorization per block row.
    """
    a = as_matrix(a)
    if shape.row_dims != shape.col_dims:
        raise ShapeUnsupported("positive block matrices need square blocks")
    shape.check(a)
    check = is_psd(a, tol)
    if not check:
        raise NotPSD(f"minimum eigenvalue {check.min_eigenvalue:.3e}")
    dims = shape.row_dims
    n = len(dims)
    off = _offsets(dims)
    roots = [sqrt_psd(hermitian_part(a[off[i]:off[i + 1], off[i]:off[i + 1]]), tol)
             for i in range(n)]
    gamma_rows: list[tuple[np.ndarray, ...]] = [()] * n
    chol = roots[n - 1]
    for k in range(n - 2, -1, -1):
        row = a[off[k]:off[k + 1], off[k + 1]:]
        try:
            rk = clip_to_contraction(pinv(roots[k], tol) @ row @ pinv(chol, tol))
            row_params = row_parametrize(rk, BlockShape((dims[k],), dims[k + 1:]), tol)
        except NotContraction as exc:
            raise NoFactor(str(exc)) from exc
        gamma_rows[k] = row_params.gammas
        f = _row_lower_factor(row_params.gammas, tol)
        trailing = sum(dims[k + 1:])
        chol = np.block([
            [roots[k], rk @ chol],
            [np.zeros((trailing, dims[k])), dagger(f) @ chol],
        ])
    return PositiveSCParams(tuple(roots), tuple(gamma_rows), shape)


def psd_cholesky(params: PositiveSCParams, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Block upper-triangular L with L*L equal to the reconstructed matrix."""
    dims = params.dims
    n = len(dims)
    chol = np.array(params.diag_roots[n - 1])
    for k in range(n - 2, -1, -1):
        gs = params.gammas[k]
        rk = row_reconstruct(
            RowColParams("row", gs, BlockShape((dims[k],), dims[k + 1:])), tol)
        f = _row_lower_factor(gs, tol)
        trailing = sum(dims[k + 1:])
        chol = np.block([
            [params.diag_roots[k], rk @ chol],
            [np.zeros((trailing, dims[k])), dagger(f) @ chol],
        ])
    return chol


def psd_reconstruct(params: PositiveSCParams, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    l = psd_cholesky(params, tol)
    return dagger(l) @ l


def tensor_sc(params_scalar: PositiveSCParams, b, tol: Tolerances = DEFAULT_TOL) -> PositiveSCParams:
    """Lift scalar-block parameters of M to parameters of M (x) B*B.

    Diagonal roots become sqrt(m_ii) (B*B)^(1/2) and every scalar gamma
    becomes gamma times the identity, so the lifted parameters reconstruct
    the tensor product exactly.
    """
    if any(d != 1 for d in params_scalar.dims):
        raise ShapeUnsupported("tensor lift needs scalar (1 x 1) blocks")
    b = as_matrix(b)
    p = b.shape[1]
    root_b = sqrt_psd(dagger(b) @ b, tol)
    eye = np.eye(p, dtype=complex)
    roots = tuple(float(r[0, 0].real) * root_b for r in params_scalar.diag_roots)
    gammas = tuple(
        tuple(complex(g[0, 0]) * eye for g in row) for row in params_scalar.gammas
    )
    n = len(params_scalar.dims)
    return PositiveSCParams(roots, gammas, BlockShape((p,) * n, (p,) * n))


def dominated_factor(
    a_params: PositiveSCParams,
    gamma_params: MatrixContractionParams,
    tol: Tolerances = DEFAULT_TOL,
) -> np.ndarray:
    """B = Gamma . L with L the Cholesky factor of the positive matrix.

    By construction B*B = L* Gamma* Gamma L <= L*L, so B is dominated by
    the reconstructed positive matrix.
    """
    l = psd_cholesky(a_params, tol)
    g = matrix_reconstruct(gamma_params, tol)
    if g.shape[1] != l.shape[0]:
        raise DimensionMismatch(
            f"contraction columns {g.shape[1]} vs factor rows {l.shape[0]}")
    return g @ l
