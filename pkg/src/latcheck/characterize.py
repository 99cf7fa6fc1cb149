"""Four equivalent characterizations of orthogonally additive polynomials.

For an n-homogeneous polynomial ``P`` on R^d with symmetric map ``T``:

  (i)   P(f + g) = P(f) + P(g) whenever f and g are disjoint;
  (ii)  P(S_n(f_1..f_r)) = sum_k P(f_k) and P(G_n(f_1..f_n)) = T(f_1..f_n)
        for positive f_k;
  (iii) P(|z|) = T_C(z^m zbar^m) for even n = 2m, and
        P(|z|) = T_C(z^m zbar^m |z|) for odd n = 2m + 1;
  (iv)  T(f^(n-k) g^k) = 0 for disjoint f, g and 1 <= k <= n - 1.

Each predicate searches a deterministic probe set for the largest violation
and compares it against a tolerance scaled to the size of the instance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb
from typing import Any, Optional, Sequence

import numpy as np

from .complexify import ComplexElement, conjugate, modulus
from .funcalc import PowerTuple, geometric_mean, root_mean_power
from .lattice import LatticeElement, is_disjoint
from .multilinear import (
    HomogeneousPolynomial,
    SymmetricMultilinearMap,
    complex_evaluate,
    evaluate,
    evaluate_power,
    polarize,
    sorted_indices,
)
from .polynomials import InstanceSpec, generate

logger = logging.getLogger(__name__)

CONDITIONS = ("i", "ii", "iii", "iv")
EXPECTED = {"oa": True, "perturbed": False, "random": None}


@dataclass(frozen=True)
class Budget:
    """Sampling policy shared by the four predicates."""

    tau: float = 1e-8
    magnitude_draws: int = 4
    random_tuples: int = 6
    random_z: int = 12
    r_values: tuple[int, ...] = (1, 2, 3, 4)
    max_enum_dim: int = 10
    sampled_splits: int = 256
    max_basis_tuples: int = 2000


@dataclass
class CheckResult:
    holds: bool
    residual: float
    tolerance: float
    witness: Optional[dict] = None

    def __iter__(self):
        # unpacks as (holds, residual, witness)
        return iter((self.holds, self.residual, self.witness))


class _Tracker:
    """Keeps the worst residual, its witness and the largest input norm."""

    def __init__(self, coeff_scale: float, n: int, tau: float):
        self.coeff_scale = coeff_scale
        self.n = n
        self.tau = tau
        self.residual = 0.0
        self.witness: Optional[dict] = None
        self.norm = 0.0

    def inputs(self, *elems) -> None:
        for e in elems:
            self.norm = max(self.norm, float(np.abs(e.coords).max()))

    def record(self, residual: float, witness) -> None:
        if residual > self.residual or self.witness is None:
            self.residual = residual
            self.witness = witness

    def result(self) -> CheckResult:
        tol = self.tau * (1.0 + self.coeff_scale * self.norm**self.n)
        return CheckResult(self.residual <= tol, float(self.residual), float(tol), self.witness)


def _rng(seed: int, tag: str) -> np.random.Generator:
    ss = np.random.SeedSequence([seed, *tag.encode()])
    return np.random.Generator(np.random.PCG64(ss))


def _norm(v) -> float:
    v = np.asarray(v, dtype=float)
    return float(np.abs(v).max()) if v.size else 0.0


def splits(d: int, budget: Budget, rng: np.random.Generator) -> list[np.ndarray]:
    """Nontrivial complementary supports as boolean masks.

    All ``2^d - 2`` of them when ``d <= budget.max_enum_dim``, otherwise a sample.
    """
    if d < 2:
        return []
    if d <= budget.max_enum_dim:
        bits = np.arange(d)
        return [((mask >> bits) & 1).astype(bool) for mask in range(1, 2**d - 1)]
    out = []
    while len(out) < budget.sampled_splits:
        mask = rng.random(d) < 0.5
        if mask.any() and not mask.all():
            out.append(mask)
    return out


def disjoint_pairs(d: int, budget: Budget, rng: np.random.Generator):
    """Disjoint ``(f, g)`` with complementary supports.

    Per split the first draw is the pair of indicators; the others carry
    random magnitudes in [0.5, 2] with random signs.
    """
    for mask in splits(d, budget, rng):
        for draw in range(budget.magnitude_draws):
            if draw == 0:
                vals = np.ones(d)
            else:
                vals = rng.uniform(0.5, 2.0, d) * rng.choice((-1.0, 1.0), d)
            f = LatticeElement(np.where(mask, vals, 0.0))
            g = LatticeElement(np.where(mask, 0.0, vals))
            assert is_disjoint(f, g, 0.0)
            yield f, g


def _positive(d: int, rng: np.random.Generator) -> LatticeElement:
    vals = rng.uniform(0.0, 2.0, d)
    vals[rng.random(d) < 0.3] = 0.0
    return LatticeElement(vals)


def cond_i_orth_additive(P: HomogeneousPolynomial, budget: Budget = Budget(),
                         seed: int = 0) -> CheckResult:
    """Largest ``|P(f+g) - P(f) - P(g)|`` over disjoint pairs."""
    n, d = P.degree, P.domain_dim
    tr = _Tracker(P.map.max_abs_coeff(), n, budget.tau)
    for f, g in disjoint_pairs(d, budget, _rng(seed, "i")):
        tr.inputs(f, g)
        res = _norm(P(f + g) - P(f) - P(g))
        tr.record(res, {"f": f.tolist(), "g": g.tolist()})
    return tr.result()


def rmp_identity_residual(P: HomogeneousPolynomial, fs: Sequence[LatticeElement]) -> float:
    """``|P(S_n(f_1..f_r)) - sum_k P(f_k)|``."""
    return _norm(P(root_mean_power(P.degree, fs)) - sum(P(f) for f in fs))


def gm_identity_residual(P: HomogeneousPolynomial, T: SymmetricMultilinearMap,
                         fs: Sequence[LatticeElement]) -> float:
    """``|P(G_n(f_1..f_n)) - T(f_1..f_n)|``."""
    gm = geometric_mean(T.order, PowerTuple(tuple((f, 1) for f in fs)))
    return _norm(P(gm) - evaluate(T, fs))


def cond_ii_means(P: HomogeneousPolynomial, T: SymmetricMultilinearMap,
                     r_values: Optional[Sequence[int]] = None, budget: Budget = Budget(),
                     seed: int = 0) -> CheckResult:
    """Both mean identities on positive tuples.

    The root-mean-power identity uses the first ``r`` elements of a tuple and
    the geometric-mean identity the first ``n``. Besides random tuples every
    sorted tuple of basis vectors is probed; for those the geometric mean of a
    mixed index vanishes, so any off-diagonal entry of ``T`` shows up directly.
    """
    n, d = T.order, T.domain_dim
    r_values = tuple(r_values or budget.r_values)
    rng = _rng(seed, "ii")
    tr = _Tracker(T.max_abs_coeff(), n, budget.tau)

    for r in r_values:
        for _ in range(budget.random_tuples):
            fs = [_positive(d, rng) for _ in range(max(n, r))][:r]
            tr.inputs(root_mean_power(n, fs), *fs)
            tr.record(rmp_identity_residual(P, fs), {"identity": "S", "r": r, "args": [f.tolist() for f in fs]})

    tuples = [[_positive(d, rng) for _ in range(n)] for _ in range(budget.random_tuples)]
    basis = [LatticeElement.basis(d, j) for j in range(d)]
    indices = sorted_indices(d, n)
    if len(indices) > budget.max_basis_tuples:
        pick = rng.choice(len(indices), budget.max_basis_tuples, replace=False)
        indices = [indices[i] for i in sorted(pick)]
    tuples += [[basis[j] for j in idx] for idx in indices]
    for fs in tuples:
        tr.inputs(geometric_mean(n, PowerTuple(tuple((f, 1) for f in fs))), *fs)
        tr.record(gm_identity_residual(P, T, fs), {"identity": "G", "args": [f.tolist() for f in fs]})
    return tr.result()


def complex_probes(d: int, budget: Budget, rng: np.random.Generator) -> list[ComplexElement]:
    """Probe points for condition (iii).

    One unit-phase point ``1_S + i 1_(S^c)`` per split, then random points
    whose imaginary part has full support (real points satisfy (iii) for
    every polynomial and cannot discriminate).
    """
    probes = []
    for mask in splits(d, budget, rng):
        probes.append(ComplexElement(LatticeElement(mask.astype(float)),
                                     LatticeElement((~mask).astype(float))))
    for _ in range(budget.random_z):
        re = rng.uniform(-2.0, 2.0, d)
        im = rng.uniform(0.25, 2.0, d) * rng.choice((-1.0, 1.0), d)
        probes.append(ComplexElement(LatticeElement(re), LatticeElement(im)))
    return probes


def modulus_identity_args(n: int, z: ComplexElement) -> list[ComplexElement]:
    """``z^m zbar^m`` for even ``n`` and ``z^m zbar^m |z|`` for odd ``n``."""
    m = n // 2
    args = [z] * m + [conjugate(z)] * m
    if n % 2:
        args.append(ComplexElement.real(modulus(z)))
    return args


def cond_iii_complex(P: HomogeneousPolynomial, T: SymmetricMultilinearMap,
                     budget: Budget = Budget(), seed: int = 0) -> CheckResult:
    """Largest deviation of ``P(|z|)`` from the complexified map.

    The imaginary part of the right-hand side must vanish as well and counts
    toward the residual.
    """
    n, d = T.order, T.domain_dim
    tr = _Tracker(T.max_abs_coeff(), n, budget.tau)
    for z in complex_probes(d, budget, _rng(seed, "iii")):
        mod = modulus(z)
        tr.inputs(mod)
        val = complex_evaluate(T, modulus_identity_args(n, z))
        res = max(_norm(P(mod) - val.re), _norm(val.im))
        tr.record(res, {"re": z.re.tolist(), "im": z.im.tolist()})
    return tr.result()


def cond_iv_annihilation(T: SymmetricMultilinearMap, budget: Budget = Budget(),
                         seed: int = 0) -> CheckResult:
    """Largest ``|T(f^(n-k) g^k)|`` over disjoint pairs and ``1 <= k <= n-1``."""
    n, d = T.order, T.domain_dim
    tr = _Tracker(T.max_abs_coeff(), n, budget.tau)
    for f, g in disjoint_pairs(d, budget, _rng(seed, "iv")):
        tr.inputs(f, g)
        for k in range(1, n):
            res = _norm(evaluate_power(T, PowerTuple.of((f, n - k), (g, k))))
            tr.record(res, {"f": f.tolist(), "g": g.tolist(), "k": k})
    return tr.result()


@dataclass
class ConditionReport:
    instance_id: str
    kind: Optional[str]
    n: int
    d: int
    m: int
    verdicts: tuple[bool, bool, bool, bool]
    residuals: tuple[float, float, float, float]
    tolerances: tuple[float, float, float, float]
    witnesses: tuple[Any, Any, Any, Any] = field(repr=False)
    agree: bool = False
    expected: Optional[bool] = None

    @property
    def expected_ok(self) -> bool:
        """Agreement, plus the labeled verdict for ``oa``/``perturbed`` kinds."""
        if not self.agree:
            return False
        return self.expected is None or all(v == self.expected for v in self.verdicts)

    def to_dict(self) -> dict:
        return {
            "id": self.instance_id,
            "kind": self.kind,
            "n": self.n,
            "d": self.d,
            "m": self.m,
            "verdicts": dict(zip(CONDITIONS, self.verdicts)),
            "residuals": dict(zip(CONDITIONS, self.residuals)),
            "tolerances": dict(zip(CONDITIONS, self.tolerances)),
            "witnesses": dict(zip(CONDITIONS, self.witnesses)),
            "agree": self.agree,
            "expected": self.expected,
            "expected_ok": self.expected_ok,
        }


def check_polynomial(P: HomogeneousPolynomial, instance_id: str = "instance",
                     kind: Optional[str] = None, budget: Budget = Budget(),
                     seed: int = 0) -> ConditionReport:
    """Run all four predicates on ``P``; its symmetric map comes from polarization."""
    n, d, m = P.degree, P.domain_dim, P.codomain_dim
    T = polarize(n, P, d, m)
    results = (
        cond_i_orth_additive(P, budget, seed),
        cond_ii_means(P, T, budget.r_values, budget, seed),
        cond_iii_complex(P, T, budget, seed),
        cond_iv_annihilation(T, budget, seed),
    )
    verdicts = tuple(r.holds for r in results)
    report = ConditionReport(
        instance_id=instance_id,
        kind=kind,
        n=n, d=d, m=m,
        verdicts=verdicts,
        residuals=tuple(r.residual for r in results),
        tolerances=tuple(r.tolerance for r in results),
        witnesses=tuple(r.witness for r in results),
        agree=len(set(verdicts)) == 1,
        expected=EXPECTED.get(kind),
    )
    if not report.agree:
        logger.warning("conditions disagree on %s: %s", instance_id, verdicts)
    return report


def equivalence_harness(spec: InstanceSpec, budget: Budget = Budget()) -> ConditionReport:
    """Generate the instance described by ``spec`` and check all four conditions."""
    P = generate(spec)
    return check_polynomial(P, spec.instance_id, spec.kind, budget, spec.seed)


def vandermonde_coeffs(n: int, samples: Sequence[tuple[float, Sequence[float]]]) -> list[np.ndarray]:
    """Coefficients ``v_0..v_n`` with ``sum_k lam^k v_k`` matching the samples.

    Solves exactly for ``n + 1`` samples and in the least-squares sense when
    oversampled.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if len(samples) < n + 1:
        raise ValueError(f"need at least {n + 1} samples, got {len(samples)}")
    lams = np.array([float(lam) for lam, _ in samples])
    if np.any(lams <= 0):
        raise ValueError("sample points must be positive")
    if len(np.unique(lams)) != len(lams):
        raise ValueError("sample points must be distinct")
    values = np.array([np.atleast_1d(np.asarray(v, dtype=float)) for _, v in samples])
    V = np.vander(lams, n + 1, increasing=True)
    if len(samples) == n + 1:
        coeffs = np.linalg.solve(V, values)
    else:
        coeffs, *_ = np.linalg.lstsq(V, values, rcond=None)
    # + 0.0 clears the signed zeros LAPACK can leave behind
    return [coeffs[k] + 0.0 for k in range(n + 1)]


def slice_samples(P: HomogeneousPolynomial, f: LatticeElement, g: LatticeElement,
                  lambdas: Optional[Sequence[float]] = None) -> list[tuple[float, np.ndarray]]:
    """Samples of ``lam -> P(f + lam g)`` on the grid ``1..n+1`` by default.

    As a polynomial in ``lam`` its k-th coefficient is ``C(n,k) T(f^(n-k) g^k)``.
    """
    n = P.degree
    lambdas = range(1, n + 2) if lambdas is None else lambdas
    return [(float(lam), P(f + float(lam) * g)) for lam in lambdas]


def slice_coefficients(P: HomogeneousPolynomial, f: LatticeElement,
                       g: LatticeElement) -> list[np.ndarray]:
    """``T(f^(n-k) g^k)``, k = 0..n, extracted from samples of ``P`` alone."""
    n = P.degree
    coeffs = vandermonde_coeffs(n, slice_samples(P, f, g))
    return [c / comb(n, k) for k, c in enumerate(coeffs)]


def psi(k: int) -> int:
    return k if k % 2 else k - 1


def binomial_psi_check(n: int) -> bool:
    """``C(n,k) - (-1)^k (C(n-1,k) - C(n-1,k-1)) == 2 C(n-1, psi(k))`` for 1 <= k <= n-1."""
    if n % 2 == 0 or n < 3:
        raise ValueError(f"n must be odd and >= 3, got {n}")
    return all(
        comb(n, k) - (-1) ** k * (comb(n - 1, k) - comb(n - 1, k - 1)) == 2 * comb(n - 1, psi(k))
        for k in range(1, n)
    )


def odd_part_check(n: int) -> bool:
    """``(1 - (-1)^k) C(n,k)`` is ``2 C(n,k)`` for odd ``k`` and 0 for even ``k``."""
    if n < 1:
        raise ValueError("n must be positive")
    return all(
        (1 - (-1) ** k) * comb(n, k) == (2 * comb(n, k) if k % 2 else 0)
        for k in range(n + 1)
    )


def multi_binomial_residual(T: SymmetricMultilinearMap, f: LatticeElement,
                            g: LatticeElement) -> float:
    """``|T((f+g)^n) - sum_k C(n,k) T(f^(n-k) g^k)|``."""
    n = T.order
    lhs = evaluate(T, [f + g] * n)
    rhs = sum(comb(n, k) * evaluate_power(T, PowerTuple.of((f, n - k), (g, k)))
              for k in range(n + 1))
    return _norm(lhs - rhs)

