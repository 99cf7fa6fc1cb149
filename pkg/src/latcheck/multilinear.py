"""Symmetric n-linear maps R^d x ... x R^d -> R^m and their polynomials.

A map is stored by sorted multi-index: ``coeffs[(i_1 <= ... <= i_n)]`` is the
entry ``T[i_1, ..., i_n]`` of the symmetric tensor, shared by every
permutation of the index. Evaluation expands this storage to the full
symmetric tensor (or, for the diagonal, weights each monomial by the number
of distinct permutations of its index).
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import factorial, prod
from typing import Callable, Mapping, Sequence

import numpy as np

from .complexify import ComplexElement
from .funcalc import PowerTuple
from .lattice import DimensionMismatch, LatticeElement

# Largest dense expansion (entries of d^n * m) evaluate() will build.
MAX_DENSE_ENTRIES = 20_000_000
MAX_POLARIZE_ORDER = 10


def multinomial(index: Sequence[int]) -> int:
    """Number of distinct permutations of a multi-index."""
    return factorial(len(index)) // prod(factorial(c) for c in Counter(index).values())


def sorted_indices(d: int, n: int) -> list[tuple[int, ...]]:
    """All nondecreasing length-``n`` index tuples over ``range(d)``."""
    return list(itertools.combinations_with_replacement(range(d), n))


@lru_cache(maxsize=64)
def _full_to_sorted_keys(d: int, n: int) -> np.ndarray:
    """Base-``d`` key of the sorted version of every full index tuple (C order)."""
    full = np.indices((d,) * n).reshape(n, -1).T
    full.sort(axis=1)
    return full @ (d ** np.arange(n - 1, -1, -1, dtype=np.int64))


def _as_number(x):
    """Keep integral values as ``int`` so exact serialization survives."""
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if x.is_integer() and abs(x) < 2**53:
        return int(x)
    return x


class SymmetricMultilinearMap:
    """Order-``n`` symmetric tensor with domain R^d and codomain R^m."""

    def __init__(self, order: int, domain_dim: int, codomain_dim: int,
                 coeffs: Mapping[Sequence[int], Sequence[float]]):
        if order < 1 or domain_dim < 1 or codomain_dim < 1:
            raise ValueError("order, domain_dim and codomain_dim must be positive")
        self.order = order
        self.domain_dim = domain_dim
        self.codomain_dim = codomain_dim
        store: dict[tuple[int, ...], tuple] = {}
        for index, value in coeffs.items():
            key = tuple(sorted(int(i) for i in index))
            if len(key) != order:
                raise ValueError(f"index {tuple(index)} has length {len(key)}, expected {order}")
            if key and (key[0] < 0 or key[-1] >= domain_dim):
                raise ValueError(f"index {tuple(index)} out of range for dimension {domain_dim}")
            value = np.atleast_1d(np.asarray(value))
            if value.shape != (codomain_dim,):
                raise ValueError(f"value at {key} has shape {value.shape}, expected ({codomain_dim},)")
            if key in store:
                raise ValueError(f"index {key} given more than once")
            store[key] = tuple(_as_number(v) for v in value.tolist())
        self._coeffs = dict(sorted(store.items()))

    @property
    def coeffs(self) -> dict[tuple[int, ...], tuple]:
        return dict(self._coeffs)

    def coefficient(self, index: Sequence[int]) -> np.ndarray:
        key = tuple(sorted(index))
        if key in self._coeffs:
            return np.array(self._coeffs[key], dtype=float)
        return np.zeros(self.codomain_dim)

    def max_abs_coeff(self) -> float:
        if not self._coeffs:
            return 0.0
        return float(np.abs(self._values).max())

    def is_integral(self) -> bool:
        return all(isinstance(v, int) for val in self._coeffs.values() for v in val)

    def __eq__(self, other):
        if not isinstance(other, SymmetricMultilinearMap):
            return NotImplemented
        return (self.order, self.domain_dim, self.codomain_dim) == \
            (other.order, other.domain_dim, other.codomain_dim) and \
            _nonzero(self._coeffs) == _nonzero(other._coeffs)

    def __repr__(self):
        return (f"SymmetricMultilinearMap(order={self.order}, domain_dim={self.domain_dim}, "
                f"codomain_dim={self.codomain_dim}, stored={len(self._coeffs)})")

    @cached_property
    def _index_array(self) -> np.ndarray:
        return np.array(list(self._coeffs), dtype=np.int64).reshape(-1, self.order)

    @cached_property
    def _values(self) -> np.ndarray:
        return np.array(list(self._coeffs.values()), dtype=float).reshape(-1, self.codomain_dim)

    @cached_property
    def _weights(self) -> np.ndarray:
        mult = np.array([multinomial(k) for k in self._coeffs], dtype=float)
        return mult[:, None] * self._values

    @cached_property
    def dense(self) -> np.ndarray:
        """Full symmetric tensor of shape ``(d,)*n + (m,)``."""
        d, n, m = self.domain_dim, self.order, self.codomain_dim
        if d**n * m > MAX_DENSE_ENTRIES:
            raise ValueError(f"dense expansion of {d}^{n}x{m} entries is too large")
        out = np.zeros((d**n, m))
        if self._coeffs:
            stored = self._index_array @ (d ** np.arange(n - 1, -1, -1, dtype=np.int64))
            full = _full_to_sorted_keys(d, n)
            pos = np.searchsorted(stored, full)
            pos = np.minimum(pos, len(stored) - 1)
            hit = stored[pos] == full
            out[hit] = self._values[pos[hit]]
        out = out.reshape((d,) * n + (m,))
        out.setflags(write=False)
        return out


def _nonzero(coeffs):
    return {k: v for k, v in coeffs.items() if any(x != 0 for x in v)}


@dataclass(frozen=True)
class HomogeneousPolynomial:
    """``P(f) = T(f, ..., f)`` for a symmetric map ``T``."""

    map: SymmetricMultilinearMap

    @property
    def degree(self) -> int:
        return self.map.order

    @property
    def domain_dim(self) -> int:
        return self.map.domain_dim

    @property
    def codomain_dim(self) -> int:
        return self.map.codomain_dim

    def __call__(self, f: LatticeElement) -> np.ndarray:
        return poly_eval(self, f)


@dataclass(frozen=True)
class ComplexCodomainValue:
    re: np.ndarray
    im: np.ndarray

    def conjugate(self) -> "ComplexCodomainValue":
        return ComplexCodomainValue(self.re, -self.im)

    def to_array(self) -> np.ndarray:
        return self.re + 1j * self.im


def _contract(dense: np.ndarray, vectors) -> np.ndarray:
    out = dense
    for v in vectors:
        out = v @ out.reshape(v.shape[0], -1)
    return out.reshape(dense.shape[-1])


@lru_cache(maxsize=None)
def _sign_patterns(n: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """Sign vectors with a leading +1 and their products."""
    eps = np.array([(1,) + t for t in itertools.product((1, -1), repeat=n - 1)], dtype=float)
    return eps, tuple(int(s) for s in eps.prod(axis=1))


def _check_args(T: SymmetricMultilinearMap, args) -> None:
    if len(args) != T.order:
        raise ValueError(f"expected {T.order} arguments, got {len(args)}")
    for a in args:
        if a.dim != T.domain_dim:
            raise DimensionMismatch(f"argument has dimension {a.dim}, expected {T.domain_dim}")


def evaluate(T: SymmetricMultilinearMap, args: Sequence[LatticeElement]) -> np.ndarray:
    """``T(f_1, ..., f_n)`` as a length-``m`` vector."""
    _check_args(T, args)
    return np.array(_contract(T.dense, [a.coords for a in args]), dtype=float)


def evaluate_power(T: SymmetricMultilinearMap, pt: PowerTuple) -> np.ndarray:
    """``T`` on the expanded power tuple, times ``pt.scale``."""
    if pt.arity != T.order:
        raise ValueError(f"power tuple has arity {pt.arity}, map has order {T.order}")
    return pt.scale * evaluate(T, pt.expand())


def poly_eval(P: HomogeneousPolynomial, f: LatticeElement) -> np.ndarray:
    T = P.map
    if f.dim != T.domain_dim:
        raise DimensionMismatch(f"argument has dimension {f.dim}, expected {T.domain_dim}")
    if not T._coeffs:
        return np.zeros(T.codomain_dim)
    monomials = f.coords[T._index_array].prod(axis=1)
    return monomials @ T._weights


def complex_evaluate(T: SymmetricMultilinearMap,
                     zargs: Sequence[ComplexElement]) -> ComplexCodomainValue:
    """``T_C(z_1, ..., z_n)``, the complexification of ``T``.

    Contracts the real tensor with complex vectors, which expands to the same
    ``2^n`` terms as :func:`complex_evaluate_expanded`.
    """
    _check_args(T, zargs)
    val = _contract(T.dense, [z.to_array() for z in zargs])
    return ComplexCodomainValue(np.real(val).astype(float), np.imag(val).astype(float))


def complex_evaluate_expanded(T: SymmetricMultilinearMap,
                              zargs: Sequence[ComplexElement]) -> ComplexCodomainValue:
    """Term-by-term ``sum_eps i^(sum eps) T(f_eps_1, ..., f_eps_n)``."""
    _check_args(T, zargs)
    re = np.zeros(T.codomain_dim)
    im = np.zeros(T.codomain_dim)
    parts = [(z.re, z.im) for z in zargs]
    for eps in itertools.product((0, 1), repeat=T.order):
        term = evaluate(T, [p[e] for p, e in zip(parts, eps)])
        power = sum(eps) % 4
        if power == 0:
            re = re + term
        elif power == 1:
            im = im + term
        elif power == 2:
            re = re - term
        else:
            im = im - term
    return ComplexCodomainValue(re, im)


def _integral(values: np.ndarray) -> bool:
    return bool(np.all(np.abs(values) < 2**53) and np.all(values == np.round(values)))


def polarization_numerator(n: int, P: Callable[[LatticeElement], np.ndarray],
                           args: Sequence[LatticeElement], m: int | None = None,
                           _cache: dict | None = None):
    """Numerator and denominator of the polarization sum at ``args``.

    ``P_check(f_1..f_n) = (1/(n! 2^n)) sum_eps (prod eps) P(sum eps_k f_k)``.
    Terms for ``eps`` and ``-eps`` coincide for an ``n``-homogeneous ``P``, so
    only ``eps_1 = +1`` is summed and the denominator is ``n! 2^(n-1)``.

    When every probe value is an integer the numerator is a list of Python
    ints, otherwise a float array.
    """
    if len(args) != n:
        raise ValueError(f"expected {n} arguments, got {len(args)}")
    denom = factorial(n) * 2 ** (n - 1)
    eps, signs = _sign_patterns(n)
    probes = eps @ np.array([a.coords for a in args])
    values = []
    for probe in probes:
        key = tuple(probe.tolist())
        if _cache is not None and key in _cache:
            val = _cache[key]
        else:
            val = np.atleast_1d(np.asarray(P(LatticeElement(probe)), dtype=float))
            if m is not None and val.shape != (m,):
                raise ValueError(f"probe returned shape {val.shape}, expected ({m},)")
            if _cache is not None:
                _cache[key] = val
        values.append(val)
    values = np.array(values)
    if _integral(values):
        ints = values.astype(np.int64).tolist()
        numer = [sum(s * row[j] for s, row in zip(signs, ints)) for j in range(values.shape[1])]
        return numer, denom
    return np.array(signs, dtype=float) @ values, denom


def polarize_value(n: int, P: Callable[[LatticeElement], np.ndarray],
                   args: Sequence[LatticeElement], m: int | None = None,
                   _cache: dict | None = None) -> np.ndarray:
    """``P_check(f_1, ..., f_n)`` recovered from the polynomial ``P``."""
    numer, denom = polarization_numerator(n, P, args, m, _cache)
    if isinstance(numer, list):
        return np.array([float(Fraction(x, denom)) for x in numer])
    return numer / denom


def polarize(n: int, P: Callable[[LatticeElement], np.ndarray], d: int, m: int,
             ) -> SymmetricMultilinearMap:
    """Recover the symmetric ``n``-linear map whose diagonal is ``P``.

    Integer probe values give exact integer (or rational) coefficients.
    """
    if not 1 <= n <= MAX_POLARIZE_ORDER:
        raise ValueError(f"polarization order must be in 1..{MAX_POLARIZE_ORDER}")
    basis = [LatticeElement.basis(d, j) for j in range(d)]
    cache: dict = {}
    coeffs = {}
    for index in sorted_indices(d, n):
        numer, denom = polarization_numerator(n, P, [basis[j] for j in index], m, cache)
        if isinstance(numer, list):
            value = [x // denom if x % denom == 0 else float(Fraction(x, denom)) for x in numer]
        else:
            value = numer / denom
        if any(v != 0 for v in value):
            coeffs[index] = value
    return SymmetricMultilinearMap(n, d, m, coeffs)
