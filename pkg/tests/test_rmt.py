import numpy as np
import pytest
from scipy import stats

from strengthci import rmt
from strengthci.models import DomainError, ModelSpec


def test_streams_are_reproducible_and_distinct():
    a = rmt.RngStream(7, 3).generator().standard_normal(5)
    b = rmt.RngStream(7, 3).generator().standard_normal(5)
    c = rmt.RngStream(7, 4).generator().standard_normal(5)
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    with pytest.raises(DomainError):
        rmt.RngStream(-1)


def test_chi_variates_moments():
    gen = np.random.default_rng(0)
    for k in (3.0, 2e4):
        x = rmt.chi_variates(np.full(40_000, k), gen)
        assert np.mean(x**2) == pytest.approx(k, rel=0.01)
        assert np.var(x**2) == pytest.approx(2 * k, rel=0.05)


def test_corner_entries_and_truncation():
    T = rmt.sample_tridiag_corner(1000, 200, 0.5, 1)
    assert T.m == 200 and T.offdiag.shape == (199,)
    small = T.truncate(50)
    assert np.array_equal(small.diag, T.diag[:50]) and np.array_equal(small.offdiag, T.offdiag[:49])
    with pytest.raises(DomainError):
        T.truncate(0)
    with pytest.raises(DomainError):
        rmt.sample_tridiag_corner(10, 11, 0.0, 1)


def test_full_tridiagonal_fills_semicircle():
    T = rmt.sample_tridiag_corner(800, 800, 0.0, 2)
    eigs = rmt.tridiagonal_eigvals_dense(T)
    assert eigs[0] == pytest.approx(2.0, abs=0.1) and eigs[-1] == pytest.approx(-2.0, abs=0.1)
    assert np.allclose(rmt.tridiag_top_eigs(T, 3), eigs[:3], atol=1e-10)


def test_noise_families_standardized():
    gen = np.random.default_rng(1)
    for fam in rmt.NoiseFamily:
        x = rmt.standardized_noise(fam, 200_000, gen)
        assert abs(x.mean()) < 0.01 and x.var() == pytest.approx(1.0, abs=0.01)


@pytest.mark.parametrize("kind", list(rmt.SignalKind))
def test_signal_vectors_orthonormal(kind):
    U = rmt.signal_vectors(30, 3, kind)
    assert np.allclose(U.T @ U, np.eye(3), atol=1e-12)
    if kind is rmt.SignalKind.DELOCALIZED:
        assert np.allclose(U[:, 0], 1 / np.sqrt(30))


def test_simulate_spiked_models_shapes(any_spec):
    th = [0.6] if any_spec.kind.value == "cca" else [4.0]
    s = rmt.simulate_spiked_model(any_spec, th, rng=3)
    assert len(s) == any_spec.N and np.all(np.diff(s.eigenvalues) <= 0)


def test_simulate_rejects_bad_thetas():
    with pytest.raises(DomainError):
        rmt.simulate_spiked_model(ModelSpec("cca", 10, 50, 10), [1.2], rng=0)
    with pytest.raises(DomainError):
        rmt.simulate_spiked_model(ModelSpec("wigner", 10), [1.0, 2.0], rng=0)


def test_spectrum_save_load(tmp_path):
    s = rmt.Spectrum(np.array([0.1, 3.0, -1.0]), ModelSpec("wigner", 3), {"seed": 1})
    s.save(tmp_path / "e.txt")
    back = rmt.Spectrum.load(tmp_path / "e.txt")
    assert np.array_equal(back.eigenvalues, s.eigenvalues) and back.spec == s.spec and back.meta == s.meta


def test_read_eigenvalues_errors(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("1.0\nfoo\n")
    with pytest.raises(DomainError):
        rmt.read_eigenvalues(p)


def test_canonical_correlations_two_ways():
    g = np.random.default_rng(4)
    U, V = g.standard_normal((6, 40)), g.standard_normal((8, 40))
    a = rmt.squared_canonical_correlations(U, V)
    b = np.sort(rmt.canonical_correlations_direct(U, V))[::-1][:6]
    assert np.allclose(a, b, atol=1e-12)


def test_wigner_edge_tridiagonal_matches_dense_in_law():
    trid = [rmt.wigner_edge_top_eig(60, 1.5, rmt.RngStream(0, i)) for i in range(1500)]
    g = np.random.default_rng(9)
    dense = []
    for _ in range(1500):
        _, A, _ = rmt.dense_spiked_wigner(60, 1.5, g.standard_normal(60), g)
        dense.append(np.linalg.eigvalsh(A)[-1])
    assert stats.ks_2samp(trid, dense).pvalue > 0.001


def test_interlacing_helper():
    assert rmt.interlaces([3, 2, 1], [2.5, 1.5])
    assert not rmt.interlaces([3, 2, 1], [3.5, 1.5])
