import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlspectra.construct import construct_2x2x2, scaled_allorthonormal_234
from mlspectra.spectra import (
    EigenSolverError,
    ModeSpectrum,
    eigvalsh_desc,
    gram_eigenvalues,
    hermitian_eig,
    is_all_orthogonal,
    largest_ml_singular_values,
    lemma6_check,
    mlsvd,
    mode2_gram_blocks,
    mode_singular_values,
    numeric_rank,
    phi,
)
from mlspectra.tensor import delta_tensor, frobenius_norm, mode_n_product, unfold
from oracles import block_bound_sides, random_complex, sigmas_lapack

seeds = st.integers(0, 2**32 - 1)


def test_hermitian_eig_trivial_cases():
    w, V = hermitian_eig(np.diag([3.0, 1.0, 0.0]))
    assert np.array_equal(w, [3.0, 1.0, 0.0]) and np.allclose(np.abs(V), np.eye(3))
    assert np.allclose(eigvalsh_desc([[0, 1], [1, 0]]), [1, -1], atol=1e-15)


def test_hermitian_eig_errors():
    with pytest.raises(ValueError):
        hermitian_eig([[0, 1], [0, 0]])
    with pytest.raises(ValueError):
        hermitian_eig(np.zeros((2, 3)))
    with pytest.raises(EigenSolverError):
        Z = np.random.default_rng(0).standard_normal((6, 6))
        hermitian_eig(Z + Z.T, max_sweeps=0)


@given(seed=seeds, n=st.integers(1, 10))
def test_hermitian_eig_recovers_synthesised_spectrum(seed, n):
    rng = np.random.default_rng(seed)
    lam = np.sort(rng.uniform(-5, 5, n))[::-1]
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    H = (Q * lam) @ Q.conj().T
    w, V = hermitian_eig(H)
    assert np.allclose(w, lam, atol=1e-10)
    assert np.allclose(H @ V, V * w, atol=1e-10 * max(1, np.linalg.norm(H)))
    assert np.allclose(V.conj().T @ V, np.eye(n), atol=1e-10)


def test_mode_singular_values_examples():
    for n in (1, 2, 3):
        assert np.allclose(mode_singular_values(delta_tensor((2, 3, 2)), n)[:2], [1, 0])
    T = construct_2x2x2(*np.sqrt([0.5, 0.5, 0.5]))
    assert np.allclose(np.abs(T[T != 0]), 0.5)
    assert np.allclose(largest_ml_singular_values(T), np.sqrt(0.5), atol=1e-12)
    S = ModeSpectrum.of(scaled_allorthonormal_234())
    for vals, d in zip(S.values, (2, 3, 4)):
        assert np.allclose(vals, np.full(d, 1 / np.sqrt(d)), atol=1e-12)
    assert np.allclose(largest_ml_singular_values(construct_2x2x2(0.9, 0.8, 0.75)), [0.9, 0.8, 0.75], atol=1e-10)
    assert np.allclose(largest_ml_singular_values(delta_tensor((2, 2, 2, 2))), 1)


@given(seed=seeds, dims=st.lists(st.integers(1, 5), min_size=2, max_size=4))
def test_mode_spectra_match_lapack_and_sum_to_norm(seed, dims):
    T = random_complex(tuple(dims), np.random.default_rng(seed))
    spec = ModeSpectrum.of(T)
    for n, vals in enumerate(spec.values, start=1):
        assert vals.size == dims[n - 1]
        assert np.all(np.diff(vals) <= 0) and np.all(vals >= 0)
        assert np.allclose(vals, sigmas_lapack(T, n), atol=1e-7)
        assert np.sum(vals**2) == pytest.approx(frobenius_norm(T) ** 2, rel=1e-10)


def test_gram_eigenvalues_pads_tall_side(rng):
    M = rng.standard_normal((5, 2))
    w = gram_eigenvalues(M)
    assert w.shape == (5,) and np.all(w[2:] == 0)


def test_order_two_mode_values_coincide(rng):
    T = random_complex((3, 5), rng)
    a, b = mode_singular_values(T, 1), mode_singular_values(T, 2)
    assert np.allclose(a, b[:3], atol=1e-12)
    assert np.allclose(a, np.linalg.svd(T, compute_uv=False), atol=1e-12)


@given(seed=seeds)
@settings(max_examples=25)
def test_spectra_invariant_under_unitary_mode_products(seed):
    rng = np.random.default_rng(seed)
    T = random_complex((2, 3, 4), rng)
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    P = mode_n_product(T, Q, 2)
    for n in (1, 3):
        assert np.allclose(mode_singular_values(P, n), mode_singular_values(T, n), atol=1e-10)


@pytest.mark.parametrize("dims", [(3, 4, 5), (2, 2, 2, 3), (6, 2)])
def test_mlsvd_invariants(dims, rng):
    T = random_complex(dims, rng)
    res = mlsvd(T)
    assert frobenius_norm(res.reconstruct() - T) <= 1e-10 * frobenius_norm(T)
    for U in res.factors:
        assert np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=1e-10)
        piv = U[np.argmax(np.abs(U), axis=0), np.arange(U.shape[1])]
        assert np.allclose(piv.imag, 0) and np.all(piv.real > 0)
    assert is_all_orthogonal(res.core, tol=1e-10)
    for n, vals in enumerate(res.spectrum.values, start=1):
        G = unfold(res.core, n) @ unfold(res.core, n).conj().T
        # squared: Gram eigenvalues at roundoff level give sigma ~ 1e-8
        assert np.allclose(np.diag(G).real, vals**2, atol=1e-10)


def test_mlsvd_of_all_orthogonal_tensor_is_a_fixed_point():
    T = np.zeros((2, 2, 2), dtype=complex)
    T[0, 0, 0], T[1, 1, 1] = 0.8, 0.6
    res = mlsvd(T)
    assert np.allclose(np.abs(res.core), np.abs(T), atol=1e-14)


def test_is_all_orthogonal():
    assert is_all_orthogonal(delta_tensor((2, 3, 2)))
    assert not is_all_orthogonal(np.ones((2, 2, 2)))
    assert is_all_orthogonal(scaled_allorthonormal_234(), tol=1e-12)


def test_block_bound_identity_example():
    r = lemma6_check(np.eye(4), 2, 2)
    assert (r.lhs, r.rhs, r.slack) == pytest.approx((3.0, 6.0, 3.0))


def test_block_bound_rank_one_product_vector_is_tight(rng):
    g = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    w = np.kron(g, x)
    r = lemma6_check(np.outer(w, w.conj()), 2, 3)
    assert abs(r.slack) <= 1e-12 * r.trace


def test_block_bound_on_mode2_blocks_matches_cyclic_slack(rng):
    T = random_complex((2, 3, 4), rng)
    H = mode2_gram_blocks(T)
    r = lemma6_check(H, 2, 4)
    s = largest_ml_singular_values(T)
    assert r.slack == pytest.approx(1 + s[2] ** 2 - s[0] ** 2 - s[1] ** 2, abs=1e-12)
    lhs, rhs = block_bound_sides(H, 2, 4)
    assert (r.lhs, r.rhs) == pytest.approx((lhs, rhs), abs=1e-12)


@pytest.mark.parametrize("size,blocks", [(2, 2), (3, 2), (2, 4)])
def test_block_bound_random_psd_sweep(size, blocks, rng):
    n = size * blocks
    for _ in range(1000):
        k = rng.integers(1, n + 1)
        X = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
        r = lemma6_check(X @ X.conj().T, size, blocks)
        assert r.slack >= -1e-10 * r.trace


def test_block_bound_errors(rng):
    with pytest.raises(ValueError):
        lemma6_check(np.eye(5), 2, 2)
    with pytest.raises(ValueError):
        lemma6_check(-np.eye(4), 2, 2)


def test_phi_block_traces(rng):
    H = rng.standard_normal((6, 6))
    P = phi(H, 3)
    assert P[0, 1] == pytest.approx(np.trace(H[:3, 3:]))


def test_numeric_rank():
    assert numeric_rank(np.diag([1.0, 1e-3, 1e-12])) == 2
    assert numeric_rank(np.zeros((2, 2))) == 0
