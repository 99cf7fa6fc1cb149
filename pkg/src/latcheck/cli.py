"""Command line front end: ``latcheck gen | check | suite``.

Exit codes: 0 success, 1 verification failure, 2 usage or format error.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import math
import os
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .characterize import (
    CONDITIONS,
    Budget,
    ConditionReport,
    binomial_psi_check,
    check_polynomial,
    odd_part_check,
)
from .complexify import ComplexElement, lemma_modulus_rhs, modulus
from .lattice import LatticeElement, close
from .multilinear import (
    HomogeneousPolynomial,
    SymmetricMultilinearMap,
    polarization_numerator,
    polarize,
    sorted_indices,
)
from .polynomials import KINDS, PRNG_NAME, InstanceSpec, generate, rng_for

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SEED_ENV = "LATCHECK_SEED"
_INT_RE = re.compile(r"^[+-]?\d+$")


class FormatError(ValueError):
    """Malformed instance file."""


@dataclass
class SuiteConfig:
    dims: list[int] = field(default_factory=lambda: [1, 2, 3, 4, 5, 6])
    degrees: list[int] = field(default_factory=lambda: [2, 3, 4, 5, 6])
    codomains: list[int] = field(default_factory=lambda: [1, 2, 3])
    kinds: list[str] = field(default_factory=lambda: list(KINDS))
    epsilons: list[float] = field(default_factory=lambda: [1e-3, 0.5])
    count: int = 1
    seed: int = 0
    tol: float = 1e-8
    r_values: list[int] = field(default_factory=lambda: [1, 2, 3, 4])
    fmt: str = "json"

    def __post_init__(self):
        for name in ("dims", "degrees", "codomains", "kinds", "epsilons", "r_values"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be nonempty")
        if min(self.dims + self.degrees + self.codomains) < 1:
            raise ValueError("dims, degrees and codomains must be positive")
        if any(k not in KINDS for k in self.kinds):
            raise ValueError(f"kinds must be among {KINDS}")
        if any(not e > 0 for e in self.epsilons):
            raise ValueError("epsilons must be positive")
        if any(not 1 <= r <= 6 for r in self.r_values):
            raise ValueError("r values must lie in 1..6")
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if not self.tol >= 0:
            raise ValueError("tol must be nonnegative")
        if self.fmt not in ("json", "csv"):
            raise ValueError("format must be json or csv")

    @property
    def budget(self) -> Budget:
        return Budget(tau=self.tol, r_values=tuple(self.r_values))

    def to_dict(self) -> dict:
        return {
            "dims": self.dims, "degrees": self.degrees, "codomains": self.codomains,
            "kinds": self.kinds, "epsilons": self.epsilons, "count": self.count,
            "seed": self.seed, "tol": self.tol, "r_values": self.r_values,
        }


def derive_seed(base: int, *key: int) -> int:
    ss = np.random.SeedSequence([base % 2**64, *key])
    return int(ss.generate_state(1, np.uint64)[0])


def instance_grid(config: SuiteConfig) -> tuple[list[InstanceSpec], list[str]]:
    """All instance specs of the config grid, plus a note for each skipped cell."""
    specs, skipped = [], []
    cells = itertools.product(config.kinds, config.dims, config.degrees, config.codomains)
    for cell, (kind, d, n, m) in enumerate(cells):
        epsilons = config.epsilons if kind == "perturbed" else [0.0]
        for e_idx, eps in enumerate(epsilons):
            if kind == "perturbed" and (d < 2 or n < 2):
                skipped.append(f"perturbed d={d} n={n}: no mixed index")
                continue
            for i in range(config.count):
                seed = derive_seed(config.seed, cell, e_idx, i)
                specs.append(InstanceSpec(d, n, m, kind, eps, seed))
    return specs, skipped


# -- instance files ----------------------------------------------------------

def _num_str(x) -> str:
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def _parse_num(s, where: str):
    if isinstance(s, bool):
        raise FormatError(f"{where}: expected a number, got {s!r}")
    if isinstance(s, int):
        return s
    if isinstance(s, float):
        value = s
    elif isinstance(s, str):
        if _INT_RE.match(s.strip()):
            return int(s)
        try:
            value = float(s)
        except ValueError:
            raise FormatError(f"{where}: {s!r} is not a decimal number") from None
    else:
        raise FormatError(f"{where}: expected a decimal string, got {type(s).__name__}")
    if not math.isfinite(value):
        raise FormatError(f"{where}: value must be finite")
    return value


def instance_to_record(spec: InstanceSpec, P: HomogeneousPolynomial) -> dict:
    return {
        "spec": {"d": spec.d, "n": spec.n, "m": spec.m, "kind": spec.kind,
                 "epsilon": _num_str(spec.epsilon), "seed": spec.seed},
        "tensor": [
            {"index": [i + 1 for i in index], "value": [_num_str(v) for v in value]}
            for index, value in P.map.coeffs.items()
        ],
    }


def record_to_instance(rec, pos: int) -> tuple[InstanceSpec, HomogeneousPolynomial]:
    where = f"record {pos}"
    if not isinstance(rec, dict) or "spec" not in rec or "tensor" not in rec:
        raise FormatError(f"{where}: expected an object with 'spec' and 'tensor'")
    sp = rec["spec"]
    if not isinstance(sp, dict):
        raise FormatError(f"{where}: 'spec' must be an object")
    try:
        d, n, m = (int(_parse_num(sp[k], f"{where}.spec.{k}")) for k in ("d", "n", "m"))
        spec = InstanceSpec(
            d=d, n=n, m=m, kind=sp["kind"],
            epsilon=float(_parse_num(sp.get("epsilon", "0"), f"{where}.spec.epsilon")),
            seed=int(_parse_num(sp.get("seed", 0), f"{where}.spec.seed")),
        )
    except KeyError as exc:
        raise FormatError(f"{where}: spec is missing {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{where}: invalid spec: {exc}") from None
    if not isinstance(rec["tensor"], list):
        raise FormatError(f"{where}: 'tensor' must be a list")
    coeffs = {}
    for j, entry in enumerate(rec["tensor"]):
        loc = f"{where}.tensor[{j}]"
        if not isinstance(entry, dict) or "index" not in entry or "value" not in entry:
            raise FormatError(f"{loc}: expected an object with 'index' and 'value'")
        index, value = entry["index"], entry["value"]
        if not isinstance(index, list) or not isinstance(value, list):
            raise FormatError(f"{loc}: index and value must be lists")
        if len(index) != spec.n:
            raise FormatError(f"{loc}: index has arity {len(index)}, declared degree is {spec.n}")
        idx = [_parse_num(i, f"{loc}.index") for i in index]
        if any(not isinstance(i, int) or not 1 <= i <= spec.d for i in idx):
            raise FormatError(f"{loc}: index entries must be integers in 1..{spec.d}")
        if idx != sorted(idx):
            raise FormatError(f"{loc}: index must be nondecreasing")
        if len(value) != spec.m:
            raise FormatError(f"{loc}: value has length {len(value)}, declared codomain is {spec.m}")
        key = tuple(i - 1 for i in idx)
        if key in coeffs:
            raise FormatError(f"{loc}: duplicate index {idx}")
        coeffs[key] = [_parse_num(v, f"{loc}.value") for v in value]
    T = SymmetricMultilinearMap(spec.n, spec.d, spec.m, coeffs)
    return spec, HomogeneousPolynomial(T)


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_instances(path: str) -> list[tuple[InstanceSpec, HomogeneousPolynomial]]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(data, list):
        raise FormatError(f"{path}: top level must be a JSON array of instances")
    return [record_to_instance(rec, i) for i, rec in enumerate(data)]


# -- checking -----------------------------------------------------------------

def _check_one(job) -> ConditionReport:
    instance_id, spec, P, budget = job
    return check_polynomial(P, instance_id, spec.kind, budget, spec.seed)


def run_checks(items, budget: Budget, jobs: int = 1) -> list[ConditionReport]:
    """Check ``(instance_id, spec, P)`` triples; reports come back sorted by id."""
    work = [(iid, spec, P, budget) for iid, spec, P in items]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_check_one, work, chunksize=4))
    else:
        reports = [_check_one(w) for w in work]
    return sorted(reports, key=lambda r: r.instance_id)


def _report_header(tol: float) -> dict:
    return {"tool": "latcheck", "version": __version__, "prng": PRNG_NAME, "tol": tol}


def reports_to_csv(reports: Sequence[ConditionReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "kind", "n", "d", "m"]
                    + [f"verdict_{c}" for c in CONDITIONS]
                    + [f"residual_{c}" for c in CONDITIONS]
                    + ["agree", "expected_ok"])
    for r in reports:
        writer.writerow([r.instance_id, r.kind, r.n, r.d, r.m, *r.verdicts,
                         *(repr(x) for x in r.residuals), r.agree, r.expected_ok])
    return buf.getvalue()


def _write(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# -- identity suites ----------------------------------------------------------

def identity_suites(seed: int, tol: float) -> dict:
    """Root-bearing modulus identities, exact binomial identities and
    polarization round-trips."""
    rtol, atol = tol / 10, tol * 1e-4
    out: dict = {}

    lemma = {}
    for n in range(1, 9):
        rng = rng_for(derive_seed(seed, 101, n))
        worst, ok = 0.0, True
        for _ in range(100):
            d = int(rng.integers(1, 9))
            z = ComplexElement(LatticeElement(rng.uniform(-10, 10, d)),
                               LatticeElement(rng.uniform(-10, 10, d)))
            lhs, rhs = modulus(z).coords, lemma_modulus_rhs(n, z).coords
            err = float(np.max(np.abs(lhs - rhs) / np.maximum(np.abs(lhs), 1e-300)))
            worst = max(worst, err)
            ok = ok and close(lhs, rhs, rtol, atol)
        lemma[str(n)] = {"passed": ok, "max_rel_error": worst}
    out["modulus_identity"] = lemma

    out["binomial_psi"] = {str(n): binomial_psi_check(n) for n in range(3, 16, 2)}
    out["odd_part"] = {str(n): odd_part_check(n) for n in range(1, 16)}

    rng = rng_for(derive_seed(seed, 202))
    trips = []
    for t in range(20):
        n, d, m = (int(rng.integers(1, 7)), int(rng.integers(1, 7)), int(rng.integers(1, 4)))
        coeffs = {idx: rng.integers(-3, 4, m).tolist() for idx in sorted_indices(d, n)}
        T = SymmetricMultilinearMap(n, d, m, coeffs)
        P = HomogeneousPolynomial(T)
        R = polarize(n, P, d, m)
        basis = [LatticeElement.basis(d, j) for j in range(d)]
        divisible = True
        for idx in sorted_indices(d, n)[:8]:
            numer, denom = polarization_numerator(n, P, [basis[j] for j in idx], m)
            divisible = divisible and isinstance(numer, list) and all(x % denom == 0 for x in numer)
        trips.append({"n": n, "d": d, "m": m, "exact": R == T, "divisible": divisible})
    out["polarization"] = trips

    out["passed"] = (
        all(v["passed"] for v in lemma.values())
        and all(out["binomial_psi"].values())
        and all(out["odd_part"].values())
        and all(t["exact"] and t["divisible"] for t in trips)
    )
    return out


def _summary_table(reports: Sequence[ConditionReport], specs: dict) -> list[str]:
    groups: dict = {}
    for r in reports:
        spec = specs[r.instance_id]
        key = (r.kind, spec.epsilon, r.n)
        g = groups.setdefault(key, {"count": 0, "ok": 0, "res": [0.0] * 4})
        g["count"] += 1
        g["ok"] += r.expected_ok
        g["res"] = [max(a, b) for a, b in zip(g["res"], r.residuals)]
    lines = [f"{'kind':<10}{'eps':>8}{'n':>3}{'count':>7}  {'status':<6}"
             + "".join(f"{'max res ' + c:>14}" for c in CONDITIONS)]
    for (kind, eps, n), g in sorted(groups.items()):
        status = "pass" if g["ok"] == g["count"] else "FAIL"
        lines.append(f"{kind:<10}{eps:>8g}{n:>3}{g['count']:>7}  {status:<6}"
                     + "".join(f"{x:>14.3e}" for x in g["res"]))
    return lines


# -- commands -----------------------------------------------------------------

def cmd_gen(config: SuiteConfig, out: Optional[str]) -> int:
    specs, skipped = instance_grid(config)
    for note in skipped:
        logger.warning("skipped %s", note)
    if not specs:
        raise ValueError("configuration yields no instances")
    records = [instance_to_record(s, generate(s)) for s in specs]
    _write(dumps_json(records), out)
    return EXIT_OK


def cmd_check(path: str, tol: float, r_values: Sequence[int], fmt: str,
              out: Optional[str], jobs: int = 1) -> int:
    instances = load_instances(path)
    budget = Budget(tau=tol, r_values=tuple(r_values))
    items = [(f"{i:05d}-{spec.instance_id}", spec, P) for i, (spec, P) in enumerate(instances)]
    reports = run_checks(items, budget, jobs)
    passed = all(r.expected_ok for r in reports)
    if fmt == "csv":
        _write(reports_to_csv(reports), out)
    else:
        doc = _report_header(tol)
        doc.update(passed=passed, reports=[r.to_dict() for r in reports])
        _write(dumps_json(doc), out)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_suite(config: SuiteConfig, out: Optional[str], jobs: int = 1,
              stream=None) -> int:
    stream = stream or sys.stdout
    start = time.perf_counter()
    specs, skipped = instance_grid(config)
    by_id = {s.instance_id: s for s in specs}
    items = [(s.instance_id, s, generate(s)) for s in specs]
    reports = run_checks(items, config.budget, jobs)
    identities = identity_suites(config.seed, config.tol)
    failures = [r.instance_id for r in reports if not r.expected_ok]
    passed = not failures and identities["passed"]

    doc = _report_header(config.tol)
    doc.update(
        config=config.to_dict(),
        passed=passed,
        summary={"instances": len(reports), "failures": failures, "skipped": skipped},
        identities=identities,
        reports=[r.to_dict() for r in reports],
    )
    if out is not None:
        if config.fmt == "csv":
            _write(reports_to_csv(reports), out)
        else:
            _write(dumps_json(doc), out)

    for line in _summary_table(reports, by_id):
        print(line, file=stream)
    for name in ("modulus_identity", "binomial_psi", "odd_part", "polarization"):
        block = identities[name]
        if name == "modulus_identity":
            ok = all(v["passed"] for v in block.values())
        elif name == "polarization":
            ok = all(t["exact"] and t["divisible"] for t in block)
        else:
            ok = all(block.values())
        print(f"identity {name:<18}{'pass' if ok else 'FAIL'}", file=stream)
    elapsed = time.perf_counter() - start
    print(f"{len(reports)} instances, {len(failures)} failures, "
          f"{'PASS' if passed else 'FAIL'} in {elapsed:.1f}s", file=stream)
    return EXIT_OK if passed else EXIT_FAIL


# -- argument parsing ---------------------------------------------------------

def _grid_args(p: argparse.ArgumentParser, defaults: SuiteConfig) -> None:
    p.add_argument("--dim", "-d", type=int, nargs="+", default=defaults.dims)
    p.add_argument("--degree", "-n", type=int, nargs="+", default=defaults.degrees)
    p.add_argument("--codomain", "-m", type=int, nargs="+", default=defaults.codomains)
    p.add_argument("--kind", nargs="+", choices=KINDS, default=defaults.kinds)
    p.add_argument("--epsilon", type=float, nargs="+", default=defaults.epsilons,
                   help="perturbation sizes for kind=perturbed")
    p.add_argument("--count", type=int, default=defaults.count, help="instances per cell")
    p.add_argument("--seed", type=int, default=0, help=f"base seed ({SEED_ENV} overrides)")


def _common_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--r-values", type=int, nargs="+", default=[1, 2, 3, 4])
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="output path (default: stdout for gen/check)")
    p.add_argument("--jobs", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latcheck",
        description="Check characterizations of orthogonally additive polynomials on R^d.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a JSON file of generated instances")
    _grid_args(gen, SuiteConfig(dims=[3], degrees=[2], codomains=[1], kinds=["oa"], count=1))
    gen.add_argument("--out", default=None)

    check = sub.add_parser("check", help="verify every instance of a file")
    check.add_argument("path")
    _common_args(check)

    suite = sub.add_parser("suite", help="generate and check a grid, plus identity suites")
    _grid_args(suite, SuiteConfig())
    _common_args(suite)
    return parser


def _seed(args) -> int:
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return args.seed


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "check":
            if not args.tol >= 0:
                raise ValueError("tol must be nonnegative")
            return cmd_check(args.path, args.tol, args.r_values, args.format, args.out, args.jobs)
        config = SuiteConfig(
            dims=args.dim, degrees=args.degree, codomains=args.codomain, kinds=args.kind,
            epsilons=args.epsilon, count=args.count, seed=_seed(args),
            tol=getattr(args, "tol", 1e-8), r_values=getattr(args, "r_values", [1, 2, 3, 4]),
            fmt=getattr(args, "format", "json"),
        )
        if args.command == "gen":
            return cmd_gen(config, args.out)
        return cmd_suite(config, args.out, args.jobs)
    except FormatError as exc:
        print(f"latcheck: format error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"latcheck: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
