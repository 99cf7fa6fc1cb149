"""Acceptance gate. Each test carries a ``criterion`` marker; the terminal
summary prints one PASS/FAIL line per criterion."""

import time
import numpy as np
import pytest

from latcheck.characterize import (
    Budget,
    binomial_psi_check,
    equivalence_harness,
    multi_binomial_residual,
    slice_coefficients,
    slice_samples,
    vandermonde_coeffs,
)
from latcheck.cli import main
from latcheck.complexify import (
    ComplexElement,
    lemma_modulus_even_rhs,
    lemma_modulus_odd_rhs,
    modulus,
    modulus_by_angles,
)
from latcheck.funcalc import PowerTuple
from latcheck.lattice import LatticeElement, close
from latcheck.multilinear import (
    HomogeneousPolynomial,
    SymmetricMultilinearMap,
    evaluate_power,
    polarization_numerator,
    polarize,
    sorted_indices,
)
from latcheck.polynomials import InstanceSpec

TAU = Budget().tau


def _random_z(rng, lo=-10.0, hi=10.0, max_dim=8):
    d = int(rng.integers(1, max_dim + 1))
    return ComplexElement(LatticeElement(rng.uniform(lo, hi, d)),
                          LatticeElement(rng.uniform(lo, hi, d)))


def _modulus_protocol(rhs, degrees, seed):
    rng = np.random.default_rng(seed)
    zs = [_random_z(rng) for _ in range(100)]
    start = time.perf_counter()
    bad = [(n, z) for n in degrees for z in zs
           if not close(modulus(z).coords, rhs(n, z).coords, rtol=1e-9, atol=1e-12)]
    elapsed = time.perf_counter() - start
    assert not bad, f"{len(bad)} mismatches, first n={bad[0][0]}"
    assert elapsed < 1.0, f"{elapsed:.2f}s"


@pytest.mark.criterion(1, "modulus identity, even n in {2,4,6,8}")
def test_modulus_identity_even():
    _modulus_protocol(lemma_modulus_even_rhs, (2, 4, 6, 8), seed=1)


@pytest.mark.criterion(2, "modulus identity, odd n in {1,3,5,7}")
def test_modulus_identity_odd():
    _modulus_protocol(lemma_modulus_odd_rhs, (1, 3, 5, 7), seed=2)


def _grid_spec(i, kind, **extra):
    n = 2 + i % 5
    d = 1 + (i // 5) % 6
    m = 1 + (i // 30) % 3
    return InstanceSpec(d, n, m, kind, seed=1000 + i, **extra)


@pytest.mark.criterion(3, "orthogonally additive instances satisfy (i)-(iv)")
def test_equivalence_positive_side():
    start = time.perf_counter()
    for i in range(200):
        spec = _grid_spec(i, "oa")
        rep = equivalence_harness(spec)
        assert rep.verdicts == (True, True, True, True), spec.instance_id
        for res, tol in zip(rep.residuals, rep.tolerances):
            scale = tol / TAU
            assert res <= 1e-8 * scale, (spec.instance_id, res, scale)
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"{elapsed:.1f}s"


@pytest.mark.criterion(4, "perturbed instances violate (i)-(iv) by at least eps/2")
def test_equivalence_negative_side():
    start = time.perf_counter()
    for i in range(200):
        eps = (1e-3, 0.5)[i % 2]
        spec = _grid_spec(i, "perturbed", epsilon=eps)
        if spec.d < 2:
            spec = InstanceSpec(2 + i % 5, spec.n, spec.m, "perturbed", eps, spec.seed)
        rep = equivalence_harness(spec)
        assert rep.verdicts == (False, False, False, False), spec.instance_id
        assert min(rep.residuals) >= eps / 2, (spec.instance_id, rep.residuals)
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"{elapsed:.1f}s"


@pytest.mark.criterion(5, "random instances: the four conditions agree")
def test_random_agreement():
    disagree = [spec.instance_id for spec in (_grid_spec(i, "random") for i in range(200))
                if not equivalence_harness(spec).agree]
    assert not disagree


@pytest.mark.criterion(6, "polarization round-trip, exact with verified divisibility")
def test_polarization_round_trip():
    rng = np.random.default_rng(6)
    for _ in range(100):
        n, d, m = int(rng.integers(1, 7)), int(rng.integers(1, 7)), int(rng.integers(1, 4))
        coeffs = {idx: rng.integers(-9, 10, m).tolist() for idx in sorted_indices(d, n)}
        T = SymmetricMultilinearMap(n, d, m, coeffs)
        P = HomogeneousPolynomial(T)
        basis = [LatticeElement.basis(d, j) for j in range(d)]
        cache = {}
        for idx in sorted_indices(d, n):
            numer, denom = polarization_numerator(n, P, [basis[j] for j in idx], m, cache)
            assert isinstance(numer, list), "integer path not taken"
            assert all(x % denom == 0 for x in numer), (n, d, idx)
            assert [x // denom for x in numer] == list(T.coefficient(idx).astype(int))
        R = polarize(n, P, d, m)
        assert R == T
        for idx in sorted_indices(d, n):
            want, got = T.coefficient(idx), R.coefficient(idx)
            assert np.all(np.abs(got - want) <= 1e-8 * np.maximum(np.abs(want), 1))


@pytest.mark.criterion(7, "multi-binomial expansion of T((f+g)^n)")
def test_multi_binomial():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n, d, m = int(rng.integers(1, 7)), int(rng.integers(1, 7)), int(rng.integers(1, 4))
        coeffs = {idx: rng.uniform(-5, 5, m).tolist() for idx in sorted_indices(d, n)}
        T = SymmetricMultilinearMap(n, d, m, coeffs)
        f = LatticeElement(rng.uniform(-3, 3, d))
        g = LatticeElement(rng.uniform(-3, 3, d))
        # |T(x_1..x_n)| <= max|coeff| * prod ||x_k||_1
        l1 = np.abs(f.coords).sum() + np.abs(g.coords).sum()
        scale = 1 + T.max_abs_coeff() * l1**n
        assert multi_binomial_residual(T, f, g) <= 1e-9 * scale


@pytest.mark.criterion(8, "binomial psi identity for odd n <= 15, exact")
def test_binomial_psi():
    assert all(binomial_psi_check(n) for n in range(3, 16, 2))


@pytest.mark.criterion(9, "slice extraction from lambda samples")
def test_slice_extraction():
    for n in range(1, 7):
        zeros = [(float(lam), np.zeros(2)) for lam in range(1, n + 2)]
        assert all(np.array_equal(c, np.zeros(2)) and not np.signbit(c).any()
                   for c in vandermonde_coeffs(n, zeros))

    rng = np.random.default_rng(9)
    for trial in range(30):
        n, d, m = 1 + trial % 6, int(rng.integers(1, 6)), int(rng.integers(1, 4))
        coeffs = {idx: rng.integers(-4, 5, m).tolist() for idx in sorted_indices(d, n)}
        T = SymmetricMultilinearMap(n, d, m, coeffs)
        P = HomogeneousPolynomial(T)
        f = LatticeElement(rng.uniform(-1, 1, d))
        g = LatticeElement(rng.uniform(-1, 1, d))
        direct = [evaluate_power(T, PowerTuple.of((f, n - k), (g, k))) for k in range(n + 1)]
        got = slice_coefficients(P, f, g)
        mag = max(np.abs(v).max() for v in direct)
        for k in range(n + 1):
            assert np.all(np.abs(got[k] - direct[k]) <= 1e-8 * mag), (n, k)
        assert len(slice_samples(P, f, g)) == n + 1


@pytest.mark.criterion(10, "closed-form modulus vs 4096-point angle grid")
def test_theta_grid():
    rng = np.random.default_rng(10)
    for _ in range(100):
        z = _random_z(rng)
        closed = modulus(z).coords
        grid = modulus_by_angles(z, 4096).coords
        assert np.all(np.abs(grid - closed) <= 1e-6 * closed)
        # the grid can touch the maximizing angle exactly; allow rounding only
        assert np.all(grid <= closed + 4 * np.spacing(closed))


@pytest.mark.criterion(11, "default suite: exit 0 under 60 s, byte-identical reruns")
def test_default_suite_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    start = time.perf_counter()
    assert main(["suite", "--out", str(a)]) == 0
    elapsed = time.perf_counter() - start
    assert main(["suite", "--out", str(b)]) == 0
    capsys.readouterr()
    assert elapsed < 60.0, f"{elapsed:.1f}s"
    assert a.read_bytes() == b.read_bytes()
