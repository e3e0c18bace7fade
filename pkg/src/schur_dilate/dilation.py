"""Constructive dilations: POVM -> PVM completion and unitary channel models.

A rank-one POVM with effects ``v_i v_i*`` summing to the identity packs
its vectors into ``M = [v_1 ... v_n]`` with ``M M* = I``, so the codomain
defect vanishes and the Julia completion

    U = [[M, 0], [D_M, -M*]]

is available without further computation.  The projectors onto the
columns of ``U`` form a PVM whose first ``n`` members compress onto the
original effects.

A trace-preserving Kraus family stacks into a column isometry
``T = [E_1; ...; E_r]`` (domain defect zero), whose Julia completion is
the unitary model of the channel on system + ancilla: conjugate the
embedded input by ``U`` and trace out the ancilla (the first, slow tensor
factor) to recover ``sum_i E_i rho E_i*``.  Both completions carry the
freedom ``diag(I, U_1) . U . diag(I, U_2)``; the freedom never touches the
first block column, so simulated outputs and compressions are invariant
under it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contraction import defect, defect_star
from .errors import (
    DimensionMismatch,
    EffectsNotRankOne,
    NotContraction,
    NotResolution,
    NotState,
    NotTracePreserving,
    NotUnitary,
    PaddingTooSmall,
)
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    dagger,
    frob,
    hermitian_part,
    is_psd,
    sqrt_psd,
)


def _check_unitary_factor(u: np.ndarray, side: int, name: str) -> np.ndarray:
    u = as_matrix(u, name)
    if u.shape != (side, side):
        raise DimensionMismatch(f"{name} must be {side} x {side}, got {u.shape}")
    if frob(dagger(u) @ u - np.eye(side)) > 1e-10 * max(1.0, side):
        raise NotUnitary(f"{name} is not unitary")
    return u


@dataclass(frozen=True)
class Povm:
    """Finite POVM on C^dim; ``vectors`` present when all effects are rank one."""

    dim: int
    effects: tuple[np.ndarray, ...]
    vectors: tuple[np.ndarray, ...] | None = None

    def __post_init__(self):
        effects = tuple(np.array(e, dtype=complex) for e in self.effects)
        for e in effects:
            if e.shape != (self.dim, self.dim):
                raise DimensionMismatch(
                    f"effect shape {e.shape} differs from dim {self.dim}")
            if not is_psd(e):
                raise NotResolution("every effect must be PSD")
            e.setflags(write=False)
        total = sum(effects)
        if np.abs(total - np.eye(self.dim)).max() > 1e-10:
            raise NotResolution("effects do not sum to the identity")
        object.__setattr__(self, "effects", effects)
        if self.vectors is not None:
            vs = tuple(np.array(v, dtype=complex).reshape(-1) for v in self.vectors)
            if len(vs) != len(effects) or any(v.shape != (self.dim,) for v in vs):
                raise DimensionMismatch("one length-dim vector per effect required")
            for v in vs:
                v.setflags(write=False)
            object.__setattr__(self, "vectors", vs)

    @classmethod
    def from_vectors(cls, vectors) -> "Povm":
        vs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
        dim = vs[0].shape[0]
        effects = [np.outer(v, v.conj()) for v in vs]
        return cls(dim=dim, effects=tuple(effects), vectors=tuple(vs))

    @classmethod
    def from_effects(cls, effects, tol: Tolerances = DEFAULT_TOL) -> "Povm":
        """Build from effects, extracting vectors when every effect is rank one."""
        effects = [as_matrix(e, "effect") for e in effects]
        dim = effects[0].shape[0]
        vectors = []
        for e in effects:
            w, v = np.linalg.eigh(hermitian_part(e))
            top = v[:, -1] * np.sqrt(max(w[-1], 0.0))
            if np.abs(np.outer(top, top.conj()) - e).max() > 1e-9:
                vectors = None
                break
            vectors.append(top)
        return cls(dim=dim, effects=tuple(effects),
                   vectors=None if vectors is None else tuple(vectors))

    @property
    def outcomes(self) -> int:
        return len(self.effects)


@dataclass(frozen=True)
class KrausChannel:
    """Kraus family E_i : C^in_dim -> C^out_dim, trace non-increasing."""

    in_dim: int
    out_dim: int
    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.array(e, dtype=complex) for e in self.kraus)
        if not ops:
            raise ValueError("at least one Kraus operator required")
        for e in ops:
            if e.shape != (self.out_dim, self.in_dim):
                raise DimensionMismatch(
                    f"Kraus shape {e.shape}, expected {(self.out_dim, self.in_dim)}")
            e.setflags(write=False)
        gram = sum(dagger(e) @ e for e in ops)
        w = np.linalg.eigvalsh(hermitian_part(gram))
        if w.size and w.max() > 1.0 + 1e-10:
            raise NotContraction(
                f"sum E*E has eigenvalue {w.max():.12f} > 1: trace increasing")
        object.__setattr__(self, "kraus", ops)

    @property
    def trace_preserving(self) -> bool:
        gram = sum(dagger(e) @ e for e in self.kraus)
        return bool(np.abs(gram - np.eye(self.in_dim)).max() <= 1e-10)

    def apply(self, rho) -> np.ndarray:
        """Direct Kraus-sum action, the oracle the dilation is checked against."""
        rho = as_matrix(rho, "rho")
        return sum(e @ rho @ dagger(e) for e in self.kraus)


@dataclass(frozen=True)
class DilationResult:
    """Unitary completion together with its embedding bookkeeping.

    ``system_span`` is the half-open index range of the original space
    inside C^k.  For channels, the total dimension is
    ``out_dim * ancilla_dim`` and ``absorbing_blocks`` lists the ancilla
    block rows added to restore trace preservation (empty if none).
    """

    kind: str  # "povm" | "channel"
    unitary: np.ndarray
    system_span: tuple[int, int]
    ancilla_dim: int
    freedom: tuple[np.ndarray, np.ndarray] | None = None
    out_dim: int | None = None
    kraus_count: int | None = None
    absorbing_blocks: tuple[int, ...] = ()

    def __post_init__(self):
        u = np.array(self.unitary, dtype=complex)
        if frob(dagger(u) @ u - np.eye(u.shape[0])) > 1e-9 * max(1.0, u.shape[0]):
            raise NotUnitary("dilation result must be unitary")
        u.setflags(write=False)
        object.__setattr__(self, "unitary", u)

    @property
    def total_dim(self) -> int:
        return self.unitary.shape[0]


def povm_dilate(povm: Povm, freedom=None, tol: Tolerances = DEFAULT_TOL) -> DilationResult:
    """Complete a rank-one POVM to a PVM on C^(m+n) via the Julia unitary.

    The system occupies the first m coordinates; projectors onto the first
    n columns compress onto the effects, the remaining m columns compress
    to zero.
    """
    if povm.vectors is None:
        raise EffectsNotRankOne("dilation needs rank-one effects with vectors")
    m = povm.dim
    n = povm.outcomes
    mm = np.column_stack(povm.vectors)
    if np.abs(mm @ dagger(mm) - np.eye(m)).max() > 1e-10:
        raise NotResolution("vectors do not resolve the identity")
    d_m = defect(mm, tol)
    u = np.block([
        [mm, np.zeros((m, m))],
        [d_m, -dagger(mm)],
    ])
    applied = None
    if freedom is not None:
        u1 = _check_unitary_factor(freedom[0], n, "U1")
        u2 = _check_unitary_factor(freedom[1], m, "U2")
        left = np.block([
            [np.eye(m), np.zeros((m, n))],
            [np.zeros((n, m)), u1],
        ])
        right = np.block([
            [np.eye(n), np.zeros((n, m))],
            [np.zeros((m, n)), u2],
        ])
        u = left @ u @ right
        applied = (u1, u2)
    return DilationResult(kind="povm", unitary=u, system_span=(0, m),
                          ancilla_dim=n, freedom=applied)


def povm_projectors(result) -> list[np.ndarray]:
    """Rank-one projectors onto the columns of the dilation unitary.

    Accepts a ``DilationResult`` or a bare (possibly corrupted) matrix, so
    verification can report on candidates that fail the unitarity invariant.
    """
    u = result.unitary if isinstance(result, DilationResult) else as_matrix(result)
    return [np.outer(u[:, i], u[:, i].conj()) for i in range(u.shape[1])]


@dataclass(frozen=True)
class PovmVerification:
    """Worst deviations of the dilated PVM from its defining properties."""

    completeness: float      # || sum_i F_i - I ||_F
    idempotency: float       # max_i || F_i^2 - F_i ||_F
    orthogonality: float     # max_{i != j} || F_i F_j ||_F
    compression: float       # max_i<n || P F_i P - E_i ||  (entrywise)
    extra_compression: float  # max_i>=n || P F_i P ||      (entrywise)
    passed: bool


def povm_verify(result, povm: Povm,
                projector_tol: float = 1e-9,
                compression_tol: float = 1e-10) -> PovmVerification:
    """Report-only check of the PVM and compression properties."""
    m = povm.dim
    n = povm.outcomes
    projectors = povm_projectors(result)
    k = projectors[0].shape[0]
    completeness = frob(sum(projectors) - np.eye(k))
    idem = max(frob(f @ f - f) for f in projectors)
    ortho = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            ortho = max(ortho, frob(projectors[i] @ projectors[j]))
    compression = max(
        np.abs(projectors[i][:m, :m] - povm.effects[i]).max() for i in range(n))
    extra = 0.0
    for i in range(n, k):
        extra = max(extra, np.abs(projectors[i][:m, :m]).max())
    passed = (completeness <= projector_tol and idem <= projector_tol
              and ortho <= projector_tol and compression <= compression_tol
              and extra <= compression_tol)
    return PovmVerification(completeness=completeness, idempotency=idem,
                            orthogonality=ortho, compression=compression,
                            extra_compression=extra, passed=passed)


def _absorbing_ops(ch: KrausChannel, tol: Tolerances) -> list[np.ndarray]:
    """Kraus completions routing the lost trace to flagged outcomes.

    The deficit Q = I - sum E*E is factored through its positive root and
    the root's rows are chunked into out_dim-row operators, so the
    extended family stays shape-homogeneous.
    """
    n, m = ch.in_dim, ch.out_dim
    deficit = np.eye(n) - sum(dagger(e) @ e for e in ch.kraus)
    root = sqrt_psd(deficit, tol)
    chunks = []
    for start in range(0, n, m):
        block = root[start:start + m, :]
        if block.shape[0] < m:
            block = np.vstack([block, np.zeros((m - block.shape[0], n))])
        chunks.append(block)
    return chunks


def channel_dilate(ch: KrausChannel, freedom=None, pad_to_ancilla: int | None = None,
                   tol: Tolerances = DEFAULT_TOL,
                   allow_trace_decreasing: bool = False) -> DilationResult:
    """Unitary model of a quantum operation on system (x) ancilla.

    The Kraus stack T is a column isometry, so the Julia completion has an
    exactly vanishing lower-left block.  The total dimension is padded by
    an identity direct sum (appended at the end, keeping the embedding
    stable) up to ``out_dim * ancilla_dim``; ``pad_to_ancilla`` picks a
    larger ancilla than the minimal one.

    Trace-decreasing channels are refused unless ``allow_trace_decreasing``
    is set, in which case flagged absorbing outcomes restore the isometry.
    """
    n, m = ch.in_dim, ch.out_dim
    ops = list(ch.kraus)
    absorbing: tuple[int, ...] = ()
    if not ch.trace_preserving:
        if not allow_trace_decreasing:
            raise NotTracePreserving("sum E*E != I; pass allow_trace_decreasing=True "
                                     "to dilate with absorbing outcomes")
        extra = _absorbing_ops(ch, tol)
        absorbing = tuple(range(len(ops), len(ops) + len(extra)))
        ops = ops + extra
    t = np.vstack(ops)
    d_t = defect(t, tol)            # exactly zero for an isometric stack
    d_t_star = defect_star(t, tol)
    rm = t.shape[0]
    u = np.block([
        [t, d_t_star],
        [d_t, -dagger(t)],
    ])
    applied = None
    if freedom is not None:
        u1 = _check_unitary_factor(freedom[0], n, "U1")
        u2 = _check_unitary_factor(freedom[1], rm, "U2")
        left = np.block([
            [np.eye(rm), np.zeros((rm, n))],
            [np.zeros((n, rm)), u1],
        ])
        right = np.block([
            [np.eye(n), np.zeros((n, rm))],
            [np.zeros((rm, n)), u2],
        ])
        u = left @ u @ right
        applied = (u1, u2)
    k0 = rm + n
    minimal = -(-k0 // m)  # ceil
    ancilla = minimal if pad_to_ancilla is None else int(pad_to_ancilla)
    if ancilla * m < k0:
        raise PaddingTooSmall(
            f"ancilla dim {ancilla} gives total {ancilla * m} < minimal {k0}")
    pad = ancilla * m - k0
    if pad:
        u = np.block([
            [u, np.zeros((k0, pad))],
            [np.zeros((pad, k0)), np.eye(pad)],
        ])
    return DilationResult(kind="channel", unitary=u, system_span=(0, n),
                          ancilla_dim=ancilla, freedom=applied, out_dim=m,
                          kraus_count=len(ch.kraus), absorbing_blocks=absorbing)


def channel_simulate(result: DilationResult, rho,
                     tol: Tolerances = DEFAULT_TOL,
                     include_absorbing: bool = True) -> np.ndarray:
    """Push a state through the dilation and trace out the ancilla.

    Embeds ``e_0 e_0* (x) rho`` (the input occupies the leading system
    coordinates), conjugates by the dilation unitary, and sums the diagonal
    out_dim blocks; excluding the absorbing blocks reproduces the original
    trace-decreasing map.
    """
    if result.kind != "channel":
        raise ValueError("channel_simulate needs a channel dilation")
    n = result.system_span[1] - result.system_span[0]
    m = result.out_dim
    rho = as_matrix(rho, "rho")
    if rho.shape != (n, n):
        raise DimensionMismatch(f"state must be {n} x {n}, got {rho.shape}")
    check = is_psd(rho, tol)
    if not check:
        raise NotState(f"state has eigenvalue {check.min_eigenvalue:.3e}")
    if np.trace(rho).real > 1.0 + tol.psd_tol:
        raise NotState("state trace exceeds 1")
    k = result.total_dim
    u = result.unitary
    x = np.zeros((k, k), dtype=complex)
    x[:n, :n] = rho
    y = u @ x @ dagger(u)
    out = np.zeros((m, m), dtype=complex)
    skip = set() if include_absorbing else set(result.absorbing_blocks)
    for block in range(k // m):
        if block in skip:
            continue
        out += y[block * m:(block + 1) * m, block * m:(block + 1) * m]
    return out
