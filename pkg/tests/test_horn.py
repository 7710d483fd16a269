import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlspectra import horn as H
from mlspectra.sampling import random_degenerate, random_psd, trial_rng
from mlspectra.spectra import ModeSpectrum
from mlspectra.tensor import delta_tensor, frobenius_norm, unfold
from oracles import horn_r1, random_complex, sigmas_lapack


def triples(ts):
    return sorted((t.I, t.J, t.K) for t in ts)


def test_base_case_sets():
    assert triples(H.generate_T(1, 2)) == [((1,), (1,), (1,)), ((1,), (2,), (2,)), ((2,), (1,), (2,))]
    assert sorted((t.I[0], t.J[0], t.K[0]) for t in H.generate_T(1, 3)) == horn_r1(3)
    for n in range(2, 7):
        assert len(H.generate_T(1, n)) == n * (n + 1) // 2
        assert sorted((t.I[0], t.J[0], t.K[0]) for t in H.generate_T(1, n)) == horn_r1(n)


def test_recursive_membership_and_memo():
    assert H.HornTriple((1, 2), (1, 2), (1, 2)) in H.generate_T(2, 3)
    assert H.generate_T(2, 4) is H.generate_T(2, 4)
    with pytest.raises(ValueError):
        H.generate_T(3, 3)
    with pytest.raises(ValueError):
        H.generate_T(1, 3, subcondition="lt")


def test_memo_is_safe_under_threads():
    out = []
    ths = [threading.Thread(target=lambda: out.append(H.generate_T(2, 5))) for _ in range(4)]
    for t in ths:
        t.start()
    for t in ths:
        t.join()
    assert all(o == out[0] for o in out)


def test_eq_subcondition_is_a_subset():
    for r, n in [(2, 3), (2, 4), (3, 4), (2, 5)]:
        d = H.subcondition_divergence(r, n)
        assert not d.only_eq
        assert set(H.generate_T(r, n, "eq")) <= set(H.generate_T(r, n))
    assert H.subcondition_divergence(2, 3).differs


def test_check_horn_examples():
    assert H.check_horn([2, 1], [1, 0], [3, 1]).feasible
    assert H.check_horn([1, 0], [1, 0], [2, 0]).feasible
    r = H.check_horn([1, 0], [1, 0], [2, 0.1])
    assert not r.feasible and r.trace_gap == pytest.approx(-0.1)
    with pytest.raises(ValueError):
        H.check_horn([1, 0], [1, 0], [2, 0, 0])
    with pytest.raises(ValueError):
        H.check_horn([0, 1], [1, 0], [2, 0])


def test_weyl_examples():
    assert H.weyl_check([2, 1], [1, 0], [3, 1]).feasible
    r = H.weyl_check([1, 1], [1, -1], [2.5, -0.5])
    assert not r.feasible and H.HornTriple((1,), (1,), (1,)) in r.violated
    r = H.weyl_check([1, 0], [1, 0], [1.5, 0.5])
    assert r.feasible
    r = H.weyl_check([1, 1], [1, 0], [1.5, 1.5])  # gamma2 > alpha1 + beta2 fails
    assert not r.feasible and H.HornTriple((1,), (2,), (2,)) in r.violated
    with pytest.raises(ValueError):
        H.weyl_check([1], [1], [2])


def test_weyl_agrees_with_horn(rng):
    for _ in range(1000):
        a, b = np.sort(rng.normal(size=2))[::-1], np.sort(rng.normal(size=2))[::-1]
        c = np.sort(rng.normal(size=2))[::-1]
        c += (a.sum() + b.sum() - c.sum()) / 2
        assert H.weyl_check(a, b, c).feasible == H.check_horn(a, b, c).feasible


@given(seed=st.integers(0, 2**32 - 1), n=st.sampled_from([2, 3, 4]))
@settings(max_examples=100)
def test_hermitian_sums_pass(seed, n):
    rng = np.random.default_rng(seed)
    A = random_psd(n, n, rng) - random_psd(n, 1, rng)
    B = random_psd(n, n, rng)
    ev = [np.linalg.eigvalsh(M)[::-1] for M in (A, B, A + B)]
    r = H.check_horn(*ev)
    assert r.feasible, r.violated


def test_equality_spectra_examples():
    # diagonal A = diag(0.16, 0), B = diag(0.05, 0.01), L = 0.5 on 3x3x3
    d = H.DegenerateData(0.5, np.diag([0.16, 0.0]), np.diag([0.05, 0.01]), (3, 3, 3))
    T = H.degenerate_construct(d)
    spec = ModeSpectrum.of(T)
    assert frobenius_norm(T) == pytest.approx(np.sqrt(0.72))
    assert H.check_thm7_spectra(spec.values, (3, 3, 3), spec.frobenius_norm).feasible
    ones = [np.array([1.0, 0, 0])] * 3
    r = H.check_thm7_spectra(ones, (3, 3, 3))
    assert r.feasible and not r.alpha.any() and not r.gamma.any()
    bad = [v.copy() for v in spec.values]
    bad[2][1] = np.sqrt(bad[2][1] ** 2 + 0.01)
    assert not H.check_thm7_spectra(bad, (3, 3, 3), spec.frobenius_norm).feasible
    with pytest.raises(H.EqualityHypothesisError):
        s = ModeSpectrum.of(random_complex((3, 3, 3), rng=np.random.default_rng(1)))
        H.check_thm7_spectra(s.values, (3, 3, 3), s.frobenius_norm)


def test_degenerate_zero_case():
    d = H.DegenerateData(1.0, np.zeros((1, 1)), np.zeros((1, 1)), (2, 2, 2))
    T = H.degenerate_construct(d)
    assert np.allclose(T, delta_tensor((2, 2, 2)))
    for n in (1, 2, 3):
        assert np.allclose(sigmas_lapack(T, n), [1, 0])


def test_degenerate_scalar_case():
    a, b, L = 0.2, 0.1, 0.5
    d = H.DegenerateData(L, np.array([[a]]), np.array([[b]]), (2, 2, 2))
    T = H.degenerate_construct(d)
    sq = [sigmas_lapack(T, n) ** 2 for n in (1, 2, 3)]
    assert np.allclose(sq[0], [L + b, a]) and np.allclose(sq[1], [L + a, b]) and np.allclose(sq[2], [L, a + b])


def test_degenerate_diagonal_bookkeeping():
    d = H.DegenerateData(3.0, np.diag([2.0, 1.0]), np.diag([1.0, 0.0]), (3, 3, 3))
    T = H.degenerate_construct(d)
    s = [sigmas_lapack(T, n)[0] ** 2 for n in (1, 2, 3)]
    assert s[0] + s[1] == pytest.approx(10) and frobenius_norm(T) ** 2 + s[2] == pytest.approx(10)


def test_degenerate_validation():
    with pytest.raises(ValueError):
        H.DegenerateData(0.1, np.eye(2), np.zeros((2, 2)), (3, 3, 3)).validate()
    with pytest.raises(ValueError):  # rank(A) = 2 > min(I1, I3) - 1 = 1
        H.DegenerateData(5.0, np.eye(2), np.zeros((2, 2)), (2, 3, 3)).validate()
    with pytest.raises(ValueError):
        H.DegenerateData(5.0, -np.eye(2), np.zeros((2, 2)), (3, 3, 3)).validate()


@pytest.mark.parametrize("dims", [(2, 2, 3), (3, 3, 3), (2, 4, 4), (4, 2, 3), (3, 2, 2)])
def test_degenerate_round_trip(dims):
    for k in range(40):
        d = random_degenerate(dims, trial_rng(7, k))
        parts = H.degenerate_parts(d)
        T = parts.tensor
        pred = H.predicted_spectra(d)
        for n in (1, 2, 3):
            assert np.allclose(sigmas_lapack(T, n) ** 2, pred[n - 1], atol=1e-9)
        spec = ModeSpectrum.of(T)
        s = spec.largest
        assert s[0] ** 2 + s[1] ** 2 - spec.frobenius_norm**2 - s[2] ** 2 == pytest.approx(0, abs=1e-9)
        assert H.check_thm7_spectra(spec.values, dims, spec.frobenius_norm).feasible
        pp = H.lemma9_verify(parts.W1, parts.G, parts.x)
        assert pp.holds, (pp.conditions, pp.identities)
        split = H.thm6_decompose_verify(T)
        assert split.residual <= 1e-8


def test_principal_pair_failure_modes(rng):
    d = random_degenerate((3, 3, 3), trial_rng(3, 0), boundary_prob=0)
    p = H.degenerate_parts(d)
    r = H.lemma9_verify(p.W1, np.zeros((3, 0)), p.x)
    assert r.holds and r.block_slack == pytest.approx(0, abs=1e-12)
    x = np.array([0.8, 0.6, 0.0], dtype=complex)
    r = H.lemma9_verify(p.W1, p.G, x)
    assert not r.conditions["principal_x"] and not r.holds
    with pytest.raises(ValueError):
        H.lemma9_verify(p.W1, p.G, np.ones(2))


def test_split_rank_one_and_precondition(rng):
    a, b, c = (rng.standard_normal(k) + 1j * rng.standard_normal(k) for k in (2, 3, 4))
    T = np.einsum("i,j,k->ijk", a, b, c)
    split = H.thm6_decompose_verify(T)
    assert np.linalg.norm(split.G) <= 1e-10 * np.linalg.norm(T)
    assert split.ranks["W"] == [1, 1, 1]
    with pytest.raises(H.EqualityHypothesisError):
        H.thm6_decompose_verify(random_complex((3, 3, 3), rng))


def test_split_structure():
    d = random_degenerate((3, 3, 3), trial_rng(11, 2), boundary_prob=0)
    T = H.degenerate_construct(d)
    split = H.thm6_decompose_verify(T)
    assert np.allclose(split.W + split.G, T, atol=1e-12)
    assert np.linalg.matrix_rank(unfold(split.W, 2), tol=1e-10) <= 1
    assert np.linalg.matrix_rank(unfold(split.G, 1), tol=1e-10) <= 1


def test_equality_spectra_from_diagonal_pair():
    # A = diag(.27, .09), B = diag(.1, .04), L = .5 gives sigma_1 = (.8, sqrt(.27), .3)
    sig = [np.sqrt([0.64, 0.27, 0.09]), np.sqrt([0.86, 0.10, 0.04]), np.sqrt([0.5, 0.37, 0.13])]
    r = H.check_thm7_spectra(sig, (3, 3, 3), 1.0)
    assert r.feasible
    assert np.allclose(r.alpha, [0.27, 0.09]) and np.allclose(r.beta, [0.1, 0.04])
    assert np.allclose(r.gamma, [0.37, 0.13])
    d = H.DegenerateData(0.5, np.diag([0.27, 0.09]), np.diag([0.1, 0.04]), (3, 3, 3))
    T = H.degenerate_construct(d)
    for n in (1, 2, 3):
        assert np.allclose(sigmas_lapack(T, n), sig[n - 1], atol=1e-12)
