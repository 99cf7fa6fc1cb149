"""Numerical checks for orthogonally additive polynomials on coordinatewise lattices."""

__version__ = "0.1.0"

from .lattice import (
    DimensionMismatch,
    LatticeElement,
    absolute,
    close,
    decompose,
    is_disjoint,
    join,
    meet,
)
from .funcalc import PowerTuple, geometric_mean, root_mean_power
from .complexify import (
    ComplexElement,
    conjugate,
    lemma_modulus_even_rhs,
    lemma_modulus_odd_rhs,
    modulus,
)
from .multilinear import (
    ComplexCodomainValue,
    HomogeneousPolynomial,
    SymmetricMultilinearMap,
    complex_evaluate,
    evaluate,
    evaluate_power,
    poly_eval,
    polarize,
)
from .polynomials import InstanceSpec, gen_oa, gen_perturbed, gen_random, generate
from .characterize import (
    Budget,
    ConditionReport,
    binomial_psi_check,
    cond_i_orth_additive,
    cond_ii_means,
    cond_iii_complex,
    cond_iv_annihilation,
    equivalence_harness,
    vandermonde_coeffs,
)
