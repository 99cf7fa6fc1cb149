"""Root mean power and geometric mean on the coordinatewise lattice.

On R^d both means reduce to their scalar formulas applied in every
coordinate:

    S_n(x_1, ..., x_r) = (sum_k |x_k|^n)^(1/n)
    G_n(x_1, ..., x_n) = (prod_k |x_k|)^(1/n)

Arguments of ``G_n`` are given as a :class:`PowerTuple`, the multiset
shorthand ``f^(n-k) g^k`` (optionally with one extra entry and a scalar
multiplying the first entry).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .lattice import DimensionMismatch, LatticeElement


def _ipow(x: np.ndarray, k: int) -> np.ndarray:
    """Integer power by repeated squaring."""
    result = np.ones_like(x)
    base = x
    while k:
        if k & 1:
            result = result * base
        k >>= 1
        if k:
            base = base * base
    return result


def _nth_root(x: np.ndarray, n: int) -> np.ndarray:
    if n == 1:
        return x
    if n == 2:
        return np.sqrt(x)
    if n == 3:
        return np.cbrt(x)
    return x ** (1.0 / n)


@dataclass(frozen=True)
class PowerTuple:
    """A multiset of lattice elements with multiplicities.

    ``entries`` holds ``(element, multiplicity)`` pairs, ``scale`` multiplies
    the first slot and ``extra`` is one distinguished additional entry.
    """

    entries: tuple[tuple[LatticeElement, int], ...]
    scale: float = 1
    extra: Optional[LatticeElement] = None

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple((e, int(k)) for e, k in self.entries))
        if not self.entries and self.extra is None:
            raise ValueError("power tuple needs at least one entry")
        if self.scale < 0:
            raise ValueError("scale must be nonnegative")
        dims = {e.dim for e, _ in self.entries}
        if self.extra is not None:
            dims.add(self.extra.dim)
        if len(dims) != 1:
            raise DimensionMismatch(f"entries have dimensions {sorted(dims)}")
        for _, k in self.entries:
            if k < 1:
                raise ValueError("multiplicities must be positive")

    @classmethod
    def of(cls, *pairs, scale=1, extra=None) -> "PowerTuple":
        """Build a power tuple, silently dropping zero multiplicities."""
        return cls(tuple((e, k) for e, k in pairs if k != 0), scale=scale, extra=extra)

    @property
    def arity(self) -> int:
        return sum(k for _, k in self.entries) + (self.extra is not None)

    @property
    def dim(self) -> int:
        return self.extra.dim if not self.entries else self.entries[0][0].dim

    def expand(self) -> list[LatticeElement]:
        """The argument list with each element repeated by its multiplicity."""
        args = [e for e, k in self.entries for _ in range(k)]
        if self.extra is not None:
            args.append(self.extra)
        return args


def root_mean_power(n: int, args: Sequence[LatticeElement]) -> LatticeElement:
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not args:
        raise ValueError("root_mean_power needs at least one argument")
    dim = args[0].dim
    if any(a.dim != dim for a in args):
        raise DimensionMismatch("arguments have different dimensions")
    absval = [np.abs(a.coords) for a in args]
    top = np.max(absval, axis=0)
    safe = np.where(top > 0, top, 1.0)
    acc = np.zeros(dim)
    # sorted accumulation keeps the result independent of argument order;
    # dividing by the coordinatewise maximum avoids overflow and underflow
    for t in sorted((_ipow(x / safe, n) for x in absval), key=lambda t: t.tolist()):
        acc = acc + t
    return LatticeElement(np.where(top > 0, top * _nth_root(acc, n), 0.0))

def geometric_mean(n: int, pt: PowerTuple) -> LatticeElement:
    """G_n of a power tuple; the scale enters as ``scale^(1/n)``."""
    if pt.arity != n:
        raise ValueError(f"power tuple has arity {pt.arity}, expected {n}")
    if pt.scale < 0:
        raise ValueError("scale must be nonnegative")
    # Mantissas and binary exponents are multiplied separately so that
    # products far outside the float range still give a representable mean.
    mant, expo = np.frexp(np.full(pt.dim, float(pt.scale)))
    expo = expo.astype(np.int64)
    factors = [(np.abs(e.coords), k) for e, k in pt.entries]
    if pt.extra is not None:
        factors.append((np.abs(pt.extra.coords), 1))
    for x, k in sorted(factors, key=lambda t: (t[0].tolist(), t[1])):
        xm, xe = np.frexp(x)
        mant, e = np.frexp(mant * _ipow(xm, k))
        expo = expo + e + k * xe.astype(np.int64)
    q, r = np.divmod(expo, n)
    root = _nth_root(np.ldexp(mant, r), n)
    return LatticeElement(np.where(mant == 0, 0.0, np.ldexp(root, q)))
