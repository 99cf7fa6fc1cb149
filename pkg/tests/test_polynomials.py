import math

import numpy as np
import pytest

from latcheck.funcalc import PowerTuple
from latcheck.lattice import LatticeElement as L
from latcheck.multilinear import HomogeneousPolynomial, SymmetricMultilinearMap, evaluate, evaluate_power
from latcheck.polynomials import (
    InstanceSpec,
    gen_oa,
    gen_perturbed,
    gen_random,
    generate,
    mixed_indices,
    perturbation_index,
)


@pytest.mark.parametrize("seed", range(5))
def test_oa_is_diagonal_and_annihilates_disjoint_mixed_powers(seed):
    spec = InstanceSpec(4, 3, 2, "oa", seed=seed)
    P = gen_oa(spec)
    for index, value in P.map.coeffs.items():
        assert len(set(index)) == 1
        assert all(isinstance(v, int) and -5 <= v <= 5 for v in value)
        assert any(value)
    f, g = L([1, -2, 0, 0]), L([0, 0, 3, 0.5])
    for k in range(1, 3):
        assert not evaluate_power(P.map, PowerTuple.of((f, 3 - k), (g, k))).any()


def test_oa_one_dimensional():
    P = gen_oa(InstanceSpec(1, 4, 1, "oa", seed=3))
    c = P.map.coefficient((0, 0, 0, 0))[0]
    assert P(L([2.0])).tolist() == [c * 16]


def test_diagonal_polynomial_value():
    P = HomogeneousPolynomial(SymmetricMultilinearMap(2, 2, 1, {(0, 0): [1], (1, 1): [1]}))
    assert P(L([1, 2])).tolist() == [5.0]


def test_perturbed_read_off():
    spec = InstanceSpec(2, 2, 1, "perturbed", epsilon=0.25, seed=1)
    P = gen_perturbed(spec)
    assert perturbation_index(spec) == (0, 1)
    e1, e2 = L.basis(2, 0), L.basis(2, 1)
    assert evaluate(P.map, [e1, e2]).tolist() == [0.25]
    # binomial oracle: P(e1+e2) - P(e1) - P(e2) = 2 T(e1, e2)
    assert (P(e1 + e2) - P(e1) - P(e2)).tolist() == [0.5]


@pytest.mark.parametrize("seed", range(5))
def test_perturbation_sits_on_top_of_oa(seed):
    base = gen_oa(InstanceSpec(4, 3, 2, "oa", seed=seed)).map.coeffs
    spec = InstanceSpec(4, 3, 2, "perturbed", epsilon=1e-3, seed=seed)
    pert = gen_perturbed(spec).map.coeffs
    index = perturbation_index(spec)
    assert index in mixed_indices(4, 3)
    assert pert.pop(index) == (1e-3, 1e-3)
    assert pert == base


def test_perturbed_needs_mixed_index():
    with pytest.raises(ValueError):
        gen_perturbed(InstanceSpec(1, 3, 1, "perturbed", epsilon=0.5))
    with pytest.raises(ValueError):
        InstanceSpec(3, 3, 1, "perturbed", epsilon=0.0)


def test_random_determinism_and_support():
    spec = InstanceSpec(3, 4, 2, "random", seed=99)
    a, b = gen_random(spec), gen_random(spec)
    assert a.map.coeffs == b.map.coeffs
    assert len(a.map.coeffs) <= math.comb(3 + 4 - 1, 4)
    assert all(-3 <= v <= 3 for val in a.map.coeffs.values() for v in val)
    assert len(gen_random(InstanceSpec(2, 2, 1, "random", seed=4)).map.coeffs) <= 3


def test_different_seeds_differ():
    a = generate(InstanceSpec(3, 3, 1, "random", seed=1)).map.coeffs
    b = generate(InstanceSpec(3, 3, 1, "random", seed=2)).map.coeffs
    assert a != b


def test_kind_dispatch_guards():
    with pytest.raises(ValueError):
        gen_oa(InstanceSpec(2, 2, 1, "random"))
    with pytest.raises(ValueError):
        InstanceSpec(2, 2, 1, "banana")
