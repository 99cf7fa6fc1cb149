"""Seeded generators of orthogonally additive, perturbed and random polynomials."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .multilinear import HomogeneousPolynomial, SymmetricMultilinearMap, sorted_indices

PRNG_NAME = "numpy.random.PCG64"
KINDS = ("oa", "perturbed", "random")


@dataclass(frozen=True)
class InstanceSpec:
    d: int
    n: int
    m: int
    kind: str
    epsilon: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if min(self.d, self.n, self.m) < 1:
            raise ValueError("d, n and m must be positive")
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "perturbed" and not self.epsilon > 0:
            raise ValueError("perturbed instances need epsilon > 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def instance_id(self) -> str:
        tag = f"-e{self.epsilon:g}" if self.kind == "perturbed" else ""
        return f"{self.kind}-d{self.d}-n{self.n}-m{self.m}{tag}-s{self.seed}"

    def to_dict(self) -> dict:
        return asdict(self)


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def mixed_indices(d: int, n: int) -> list[tuple[int, ...]]:
    """Sorted multi-indices with at least two distinct coordinates."""
    return [idx for idx in sorted_indices(d, n) if idx[0] != idx[-1]]


def _diagonal_coeffs(spec: InstanceSpec, rng: np.random.Generator) -> dict:
    coeffs = {}
    for j in range(spec.d):
        c = rng.integers(-5, 6, size=spec.m)
        while not c.any():
            c = rng.integers(-5, 6, size=spec.m)
        coeffs[(j,) * spec.n] = c.tolist()
    return coeffs


def gen_oa(spec: InstanceSpec) -> HomogeneousPolynomial:
    """``P(f) = sum_j c_j f_j^n`` with integer ``c_j`` in [-5, 5], never all zero."""
    if spec.kind != "oa":
        raise ValueError("gen_oa needs kind='oa'")
    coeffs = _diagonal_coeffs(spec, rng_for(spec.seed))
    return HomogeneousPolynomial(SymmetricMultilinearMap(spec.n, spec.d, spec.m, coeffs))


def perturbation_index(spec: InstanceSpec) -> tuple[int, ...]:
    """The mixed multi-index carrying the perturbation of ``gen_perturbed``."""
    if spec.d < 2 or spec.n < 2:
        raise ValueError("perturbation needs d >= 2 and n >= 2 (no mixed index otherwise)")
    rng = rng_for(spec.seed)
    _diagonal_coeffs(spec, rng)
    mixed = mixed_indices(spec.d, spec.n)
    return mixed[int(rng.integers(len(mixed)))]


def gen_perturbed(spec: InstanceSpec) -> HomogeneousPolynomial:
    """The ``gen_oa`` polynomial plus ``epsilon`` on one seeded mixed index."""
    if spec.kind != "perturbed":
        raise ValueError("gen_perturbed needs kind='perturbed'")
    index = perturbation_index(spec)
    coeffs = _diagonal_coeffs(spec, rng_for(spec.seed))
    coeffs[index] = [spec.epsilon] * spec.m
    return HomogeneousPolynomial(SymmetricMultilinearMap(spec.n, spec.d, spec.m, coeffs))


def gen_random(spec: InstanceSpec) -> HomogeneousPolynomial:
    """Integer coefficients in [-3, 3] on every sorted multi-index."""
    if spec.kind != "random":
        raise ValueError("gen_random needs kind='random'")
    rng = rng_for(spec.seed)
    coeffs = {}
    for idx in sorted_indices(spec.d, spec.n):
        c = rng.integers(-3, 4, size=spec.m)
        if c.any():
            coeffs[idx] = c.tolist()
    return HomogeneousPolynomial(SymmetricMultilinearMap(spec.n, spec.d, spec.m, coeffs))


def generate(spec: InstanceSpec) -> HomogeneousPolynomial:
    return {"oa": gen_oa, "perturbed": gen_perturbed, "random": gen_random}[spec.kind](spec)
