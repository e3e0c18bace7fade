import numpy as np
import pytest

from schur_dilate.errors import DimensionMismatch, NotUnital, UnknownName
from schur_dilate.families import bell_projector
from schur_dilate.linalg import dagger, hermitian_part, is_psd
from schur_dilate.maps import (
    apply_blockwise,
    builtin_witness,
    map_from_kraus_pairs,
    positivity_inequality_suite,
    unital_witness,
    vec,
)
from schur_dilate.sampling import complex_gaussian, random_psd, rng_from_seed


def matrix_unit(n, i, j):
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1.0
    return e


def entrywise_partial_transpose(a, k, n):
    out = np.zeros_like(a)
    for i in range(k):
        for j in range(k):
            out[i * n:(i + 1) * n, j * n:(j + 1) * n] = \
                a[i * n:(i + 1) * n, j * n:(j + 1) * n].T
    return out


def test_identity_pair_gives_identity_map():
    phi = map_from_kraus_pairs([(np.eye(2), np.eye(2))])
    rng = rng_from_seed(71)
    x = complex_gaussian(rng, 2, 2)
    np.testing.assert_allclose(phi(x), x, atol=1e-14)
    assert phi.unital and phi.trace_preserving and phi.hermiticity_preserving


def test_transpose_from_pairs_matches_entrywise():
    n = 3
    pairs = [(matrix_unit(n, i, j), matrix_unit(n, j, i))
             for i in range(n) for j in range(n)]
    phi = map_from_kraus_pairs(pairs)
    rng = rng_from_seed(72)
    for _ in range(5):
        x = complex_gaussian(rng, n, n)
        np.testing.assert_allclose(phi(x), x.T, atol=1e-12)


def test_amplitude_damping_pairs_trace_preserving():
    e0 = np.array([[1.0, 0.0], [0.0, 0.8]])
    e1 = np.array([[0.0, 0.6], [0.0, 0.0]])
    phi = map_from_kraus_pairs([(e0, e0), (e1, e1)])
    assert phi.trace_preserving
    assert not phi.unital


def test_kraus_pairs_validation():
    with pytest.raises(ValueError):
        map_from_kraus_pairs([])
    with pytest.raises(DimensionMismatch):
        map_from_kraus_pairs([(np.eye(2), np.eye(2)), (np.eye(3), np.eye(3))])


def test_builtin_transpose_and_reduction_values():
    t = builtin_witness("transpose", 2)
    np.testing.assert_allclose(t(np.eye(2)), np.eye(2), atol=1e-14)
    r = builtin_witness("reduction", 2)
    np.testing.assert_allclose(r(np.diag([1.0, 0.0])), np.diag([0.0, 1.0]),
                               atol=1e-14)
    with pytest.raises(UnknownName):
        builtin_witness("nope")
    with pytest.raises(UnknownName):
        builtin_witness("choi3", dim=4)


def test_bell_partial_transpose_spectrum():
    phi = builtin_witness("transpose", 2)
    out = apply_blockwise(phi, bell_projector(), 2)
    w = np.linalg.eigvalsh(hermitian_part(out))
    assert w[0] == pytest.approx(-0.5, abs=1e-12)


def test_choi3_definition_entries():
    phi = builtin_witness("choi3")
    rng = rng_from_seed(73)
    x = complex_gaussian(rng, 3, 3)
    y = phi(x)
    expected = np.array([
        [x[0, 0] + x[1, 1], -x[0, 1], -x[0, 2]],
        [-x[1, 0], x[1, 1] + x[2, 2], -x[1, 2]],
        [-x[2, 0], -x[2, 1], x[2, 2] + x[0, 0]],
    ])
    np.testing.assert_allclose(y, expected, atol=1e-13)


def test_choi3_positive_on_psd_but_not_cp():
    phi = builtin_witness("choi3")
    rng = rng_from_seed(74)
    for _ in range(50):
        p = random_psd(rng, 3)
        assert is_psd(phi(p)).ok
    # Choi matrix of the map has a negative eigenvalue: not completely positive
    choi = sum(np.kron(matrix_unit(3, i, j), phi(matrix_unit(3, i, j)))
               for i in range(3) for j in range(3))
    assert np.linalg.eigvalsh(hermitian_part(choi))[0] < -0.5


def test_apply_blockwise_identity_and_single_block():
    ident = map_from_kraus_pairs([(np.eye(2), np.eye(2))])
    rng = rng_from_seed(75)
    a = complex_gaussian(rng, 6, 6)
    np.testing.assert_allclose(apply_blockwise(ident, a, 3), a, atol=1e-13)
    x = complex_gaussian(rng, 2, 2)
    np.testing.assert_allclose(apply_blockwise(ident, x, 1), x, atol=1e-13)


def test_apply_blockwise_matches_entrywise_partial_transpose():
    phi = builtin_witness("transpose", 3)
    rng = rng_from_seed(76)
    a = complex_gaussian(rng, 9, 9)
    np.testing.assert_allclose(apply_blockwise(phi, a, 3),
                               entrywise_partial_transpose(a, 3, 3), atol=1e-13)


def test_apply_blockwise_linear():
    phi = builtin_witness("reduction", 2)
    rng = rng_from_seed(77)
    a = complex_gaussian(rng, 4, 4)
    b = complex_gaussian(rng, 4, 4)
    lhs = apply_blockwise(phi, 2.0 * a + 1j * b, 2)
    rhs = 2.0 * apply_blockwise(phi, a, 2) + 1j * apply_blockwise(phi, b, 2)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_apply_blockwise_shape_check():
    phi = builtin_witness("transpose", 2)
    with pytest.raises(DimensionMismatch):
        apply_blockwise(phi, np.eye(5), 2)


@pytest.mark.parametrize("name", ["transpose", "reduction", "choi3"])
def test_witnesses_preserve_hermiticity(name):
    phi = builtin_witness(name, 3)
    assert phi.hermiticity_preserving
    rng = rng_from_seed(78)
    for _ in range(10):
        x = complex_gaussian(rng, 3, 3)
        np.testing.assert_allclose(phi(dagger(x)), dagger(phi(x)), atol=1e-12)


def test_vectorization_convention():
    # column stacking: vec([[a, b], [c, d]]) = (a, c, b, d)
    x = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_allclose(vec(x), [1.0, 3.0, 2.0, 4.0])


def test_suite_requires_unital_positive():
    with pytest.raises(NotUnital):
        positivity_inequality_suite(builtin_witness("reduction", 3), 5)
    ident = map_from_kraus_pairs([(np.eye(2), np.eye(2))])  # not declared positive
    with pytest.raises(NotUnital):
        positivity_inequality_suite(ident, 5)


@pytest.mark.parametrize("name", ["transpose", "reduction"])
def test_suite_passes_for_unital_witnesses(name):
    phi = unital_witness(name, 3)
    report = positivity_inequality_suite(phi, 50, seed=5)
    assert not report.failures
    assert report.norm_excess <= 1e-10
    assert report.worst_eigenvalue() >= -1e-9


def test_suite_zero_contraction_edge_is_exactly_flat():
    # G = 0: I - phi(G*G) - phi(D_{G*})^2 collapses to I - phi(I)^2 = 0
    phi = unital_witness("transpose", 3)
    g = np.zeros((3, 3))
    q = np.eye(3) - phi(dagger(g) @ g) - phi(np.eye(3)) @ phi(np.eye(3))
    assert np.abs(q).max() == 0.0
