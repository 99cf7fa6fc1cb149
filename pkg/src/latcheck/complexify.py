"""Complexification ``E + iE`` of the coordinatewise lattice."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .funcalc import PowerTuple, geometric_mean, root_mean_power
from .lattice import DimensionMismatch, LatticeElement


@dataclass(frozen=True)
class ComplexElement:
    re: LatticeElement
    im: LatticeElement

    def __post_init__(self):
        if self.re.dim != self.im.dim:
            raise DimensionMismatch(f"re/im dimensions differ: {self.re.dim} vs {self.im.dim}")

    @classmethod
    def real(cls, f: LatticeElement) -> "ComplexElement":
        return cls(f, LatticeElement.zero(f.dim))

    @classmethod
    def from_array(cls, z) -> "ComplexElement":
        z = np.asarray(z, dtype=complex)
        return cls(LatticeElement(z.real), LatticeElement(z.imag))

    @property
    def dim(self) -> int:
        return self.re.dim

    def to_array(self) -> np.ndarray:
        return self.re.coords + 1j * self.im.coords


def conjugate(z: ComplexElement) -> ComplexElement:
    return ComplexElement(z.re, -z.im)


def modulus(z: ComplexElement) -> LatticeElement:
    """``|z|`` in closed form; on R^d the supremum over angles is attained
    coordinatewise, giving ``sqrt(re^2 + im^2)``."""
    return root_mean_power(2, [z.re, z.im])


def modulus_by_angles(z: ComplexElement, points: int = 4096) -> LatticeElement:
    """``sup_theta (cos theta) re + (sin theta) im`` over a uniform angle grid.

    Slow reference form of :func:`modulus`; never exceeds it.
    """
    theta = np.linspace(0.0, 2.0 * np.pi, points, endpoint=False)
    vals = np.outer(np.cos(theta), z.re.coords) + np.outer(np.sin(theta), z.im.coords)
    return LatticeElement(vals.max(axis=0))


def lemma_modulus_even_rhs(n: int, z: ComplexElement) -> LatticeElement:
    """S_n over G_n(C(m,k) f^(n-2k) g^(2k)), k = 0..m, with m = n/2."""
    if n < 2 or n % 2:
        raise ValueError(f"n must be even and >= 2, got {n}")
    m = n // 2
    f, g = z.re, z.im
    means = [
        geometric_mean(n, PowerTuple.of((f, n - 2 * k), (g, 2 * k), scale=comb(m, k)))
        for k in range(m + 1)
    ]
    return root_mean_power(n, means)


def lemma_modulus_odd_rhs(n: int, z: ComplexElement) -> LatticeElement:
    """S_n over G_n(C(m,k) f^(n-1-2k) g^(2k) |z|), k = 0..m, with m = (n-1)/2."""
    if n < 1 or n % 2 == 0:
        raise ValueError(f"n must be odd and >= 1, got {n}")
    m = (n - 1) // 2
    f, g = z.re, z.im
    mod = modulus(z)
    means = [
        geometric_mean(
            n, PowerTuple.of((f, n - 1 - 2 * k), (g, 2 * k), scale=comb(m, k), extra=mod)
        )
        for k in range(m + 1)
    ]
    return root_mean_power(n, means)


def lemma_modulus_rhs(n: int, z: ComplexElement) -> LatticeElement:
    """Dispatch on the parity of ``n``."""
    return lemma_modulus_even_rhs(n, z) if n % 2 == 0 else lemma_modulus_odd_rhs(n, z)
