"""Coordinatewise vector lattice on R^d.

Every element is immutable; all lattice operations are pure functions that
return new elements.
"""

from __future__ import annotations

import numpy as np

# Tolerance policy for comparisons that involve an n-th root.
RTOL = 1e-9
ATOL = 1e-12


class DimensionMismatch(ValueError):
    """Raised when two lattice elements live in different dimensions."""


class LatticeElement:
    """A point of R^d ordered coordinatewise."""

    __slots__ = ("_coords",)

    def __init__(self, coords):
        arr = np.atleast_1d(np.array(coords, dtype=float))
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("coords must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coords must be finite")
        arr.setflags(write=False)
        self._coords = arr

    @classmethod
    def zero(cls, dim: int) -> "LatticeElement":
        return cls(np.zeros(dim))

    @classmethod
    def basis(cls, dim: int, j: int) -> "LatticeElement":
        v = np.zeros(dim)
        v[j] = 1.0
        return cls(v)

    @classmethod
    def indicator(cls, dim: int, support) -> "LatticeElement":
        v = np.zeros(dim)
        v[list(support)] = 1.0
        return cls(v)

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def dim(self) -> int:
        return self._coords.size

    def is_positive(self) -> bool:
        """Membership in the positive cone."""
        return bool(np.all(self._coords >= 0))

    def _check(self, other: "LatticeElement") -> None:
        if other.dim != self.dim:
            raise DimensionMismatch(f"dimensions differ: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, LatticeElement):
            return NotImplemented
        self._check(other)
        return LatticeElement(self._coords + other._coords)

    def __sub__(self, other):
        if not isinstance(other, LatticeElement):
            return NotImplemented
        self._check(other)
        return LatticeElement(self._coords - other._coords)

    def __neg__(self):
        return LatticeElement(-self._coords)

    def __mul__(self, scalar):
        if isinstance(scalar, LatticeElement):
            return NotImplemented
        return LatticeElement(float(scalar) * self._coords)

    __rmul__ = __mul__

    def __abs__(self):
        return absolute(self)

    def __eq__(self, other):
        if not isinstance(other, LatticeElement):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self._coords, other._coords))

    def __hash__(self):
        return hash(tuple(self._coords.tolist()))

    def __le__(self, other):
        self._check(other)
        return bool(np.all(self._coords <= other._coords))

    def __ge__(self, other):
        return other.__le__(self)

    def __repr__(self):
        return f"LatticeElement({self._coords.tolist()})"

    def tolist(self) -> list[float]:
        return self._coords.tolist()


def _pair(f: LatticeElement, g: LatticeElement) -> None:
    if f.dim != g.dim:
        raise DimensionMismatch(f"dimensions differ: {f.dim} vs {g.dim}")


def join(f: LatticeElement, g: LatticeElement) -> LatticeElement:
    _pair(f, g)
    return LatticeElement(np.maximum(f.coords, g.coords))


def meet(f: LatticeElement, g: LatticeElement) -> LatticeElement:
    _pair(f, g)
    return LatticeElement(np.minimum(f.coords, g.coords))


def neg(f: LatticeElement) -> LatticeElement:
    return -f


def absolute(f: LatticeElement) -> LatticeElement:
    return LatticeElement(np.abs(f.coords))


def decompose(f: LatticeElement) -> tuple[LatticeElement, LatticeElement]:
    """Return ``(f+, f-)`` with ``f = f+ - f-`` and the two parts disjoint."""
    zero = np.zeros(f.dim)
    return LatticeElement(np.maximum(f.coords, zero)), LatticeElement(np.maximum(-f.coords, zero))


def is_disjoint(f: LatticeElement, g: LatticeElement, tol: float = 0.0) -> bool:
    _pair(f, g)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return bool(np.all(np.minimum(np.abs(f.coords), np.abs(g.coords)) <= tol))


def close(a, b, rtol: float = RTOL, atol: float = ATOL) -> bool:
    """Coordinatewise relative comparison with an absolute floor.

    Accepts lattice elements or plain arrays.
    """
    x = a.coords if isinstance(a, LatticeElement) else np.asarray(a, dtype=float)
    y = b.coords if isinstance(b, LatticeElement) else np.asarray(b, dtype=float)
    if x.shape != y.shape:
        raise DimensionMismatch(f"shapes differ: {x.shape} vs {y.shape}")
    bound = np.maximum(atol, rtol * np.maximum(np.abs(x), np.abs(y)))
    return bool(np.all(np.abs(x - y) <= bound))
