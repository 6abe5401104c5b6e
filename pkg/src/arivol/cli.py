"""``arivol`` command line: JSON verification reports.

Exit codes: 0 when every result passes, 1 on a failed check, 2 on invalid input.
"""
from __future__ import annotations

import argparse
import configparser
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import metadata
from math import isfinite, log10

import mpmath

from .suites import SUITES, Result, _fmt, check


class InvalidInput(ValueError):
    pass


@dataclass
class Report:
    command: str
    inputs: dict
    precision: int
    seed: int
    results: list = field(default_factory=list)

    def add(self, r: Result):
        self.results.append(r)

    @property
    def failed(self) -> bool:
        return any(r.status == "fail" for r in self.results)

    def as_dict(self) -> dict:
        try:
            version = metadata.version("artifact")
        except metadata.PackageNotFoundError:
            version = "unknown"
        return {"command": self.command, "inputs": _fmt(self.inputs),
                "results": [r.as_dict() for r in self.results],
                "seed": str(self.seed),
                "versions": {"artifact": version, "precision": str(self.precision)}}


def _digits(prec: int) -> int:
    return max(int(prec * log10(2)) - 2, 6)


def _num(x, prec: int) -> str:
    v = getattr(x, "value", x)
    with mpmath.workprec(prec + 16):
        return mpmath.nstr(mpmath.mpf(v), _digits(prec), strip_zeros=False)


# --- input validation -----------------------------------------------------------------

def _field_disc(dF) -> int:
    from .numth import is_fundamental_discriminant
    if dF is None:
        raise InvalidInput("--dF is required")
    if dF <= 1 or not is_fundamental_discriminant(dF):
        raise InvalidInput(f"{dF} is not a positive fundamental discriminant")
    return dF


def _split_primes(dF: int, DB) -> tuple:
    from .numth import is_prime, kronecker
    if not DB:
        raise InvalidInput("--DB is required")
    try:
        ps = tuple(int(t) for t in str(DB).split(",") if t.strip())
    except ValueError as e:
        raise InvalidInput(f"bad --DB list {DB!r}") from e
    if not ps or len(set(ps)) != len(ps):
        raise InvalidInput("--DB needs distinct primes")
    for p in ps:
        if not is_prime(p):
            raise InvalidInput(f"{p} is not prime")
        if kronecker(dF, p) != 1:
            raise InvalidInput(f"{p} is not split in Q(sqrt {dF})")
    return ps


# --- commands --------------------------------------------------------------------------------

def cmd_field(args) -> Report:
    from .eisen import rational_snap
    from .numth import QuadChar, gen_bernoulli
    from .specialvals import (siegel_zetaF_minus1, zetaF, zetaF2_normalized,
                              zetaF2_rational_part, zetaF_logderiv_at_2, zetaF_minus1)
    dF = _field_disc(args.dF)
    p = args.prec
    rep = Report("field", {"dF": dF, "prec": p}, p, args.seed)
    a, b = zetaF_minus1(dF), siegel_zetaF_minus1(dF)
    rep.add(check("zetaF_minus1", a == b, a, "exact"))
    rep.add(Result("zetaF_minus1_siegel", "pass", b, "exact"))
    rep.add(Result("B2_chi", "pass", gen_bernoulli(QuadChar.of(dF), 2), "exact"))
    rep.add(Result("zetaF_2", "pass", _num(zetaF(2, dF, p), p)))
    nz = zetaF2_normalized(dF, p)
    snap = rational_snap(nz.value, 10 ** 8, 1e-20 if p >= 96 else 1e-12)
    rep.add(check("zetaF_2_normalized_snap", snap == zetaF2_rational_part(dF), snap,
                  "1e-20" if p >= 96 else "1e-12"))
    rep.add(Result("zetaF_logderiv_2", "pass", _num(zetaF_logderiv_at_2(dF, p), p)))
    return rep


def cmd_constants(args) -> Report:
    from . import constants as C
    from .quatalg import target_ramification
    dF = _field_disc(args.dF)
    ps = _split_primes(dF, args.DB)
    D_B = 1
    for q in target_ramification(dF, ps):
        D_B *= q
    try:
        mode = C.QuotientMode.parse(args.mode)
    except ValueError as e:
        raise InvalidInput(str(e)) from e
    p = args.prec
    rep = Report("constants", {"dF": dF, "DB": ",".join(map(str, ps)), "D_B": D_B,
                               "mode": args.mode, "prec": p}, p, args.seed)
    thm, hor, bor = C.thm_main_constant(dF), C.hormann_constant(dF), C.borcherds_integral_constant(dF)
    for name, x in (("thm_main", thm), ("hormann", hor), ("borcherds_integral", bor)):
        rep.add(Result(name, "pass", json.loads(mode.reduce(x).to_json())))
    rep.add(check("first_reduction", C.first_reduction_check(dF), None, "exact"))
    mc = C.metric_constants(D_B)
    rep.add(Result("metric_constants", "pass",
                   {k: json.loads(getattr(mc, k).to_json())
                    for k in ("log_c_taut", "log_fritz", "log_metric_Lj")}))
    hl = C.hormann_from_lambda(dF, D_B)
    rep.add(check("hormann_vs_lambda_logQbar",
                  C.quotient_compare(hl, hor, C.QuotientMode("logQbar")), None, "exact"))
    rep.add(Result("hormann_vs_lambda_" + args.mode,
                   "pass" if C.quotient_compare(hl, hor, mode) else "skip",
                   json.loads(mode.reduce(hl - hor).to_json())))
    for name, x in (("thm_main_numeric", thm), ("hormann_numeric", hor),
                    ("borcherds_integral_numeric", bor)):
        v = C.numeric_eval(x, dF, p)
        rep.add(check(name, isfinite(float(v.value)), _num(v, p), _num(v.err, p)))
    return rep


def cmd_verify(args) -> Report:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    inputs = {"suite": args.suite, "prec": args.prec}
    if "clifford" in names:
        dF = _field_disc(args.dF if args.dF is not None else 5)
        ps = _split_primes(dF, args.DB or "11,19")
        inputs.update(dF=dF, DB=",".join(map(str, ps)))
    rep = Report("verify", inputs, args.prec, args.seed)
    for name in names:
        if name == "clifford":
            res = SUITES[name](dF, ps)
        elif name in ("theta", "hypcalc"):
            res = SUITES[name](seed=args.seed)
        else:
            res = SUITES[name]()
        for r in res:
            r.name = f"{name}: {r.name}"
            rep.add(r)
    return rep


def cmd_eisenstein(args) -> Report:
    from .eisen import EisensteinLattice, modularity_defect, q_expansion, rational_snap
    from .suites import A_PLUS_H, A_PLUS_H_PLUS_2
    if args.lattice not in ("2,2", "3,2"):
        raise InvalidInput("--lattice must be 2,2 or 3,2")
    if args.nmax < 1:
        raise InvalidInput("--nmax must be positive")
    gram = A_PLUS_H if args.lattice == "2,2" else A_PLUS_H_PLUS_2
    L = EisensteinLattice.of(gram)
    rep = Report("eisenstein", {"lattice": args.lattice, "nmax": args.nmax, "prec": args.prec},
                 args.prec, args.seed)
    co = q_expansion(L, args.nmax)
    for n in sorted(co):
        snaps = [rational_snap(complex(x), 10 ** 6, 1e-9) if abs(x) > 0 else Fraction(0)
                 for x in co[n]]
        rep.add(check(f"c({n})", all(s is not None for s in snaps), snaps, "1e-9"))
    tau = 1j if args.lattice == "2,2" else 1.1j
    d = modularity_defect(L, co, tau)
    rep.add(check(f"modularity probe at tau = {tau}", d < 1e-6, d, "1e-6"))
    return rep


def cmd_theta(args) -> Report:
    from .suites import theta_samples, theta_suite
    if args.samples < 1:
        raise InvalidInput("--samples must be positive")
    pts = theta_samples(args.seed, args.samples)
    rep = Report("theta", {"prec": args.prec, "samples": args.samples,
                           "points": [[t, a, b] for t, a, b in pts]}, args.prec, args.seed)
    for r in theta_suite(seed=args.seed, count=args.samples):
        rep.add(r)
    return rep


COMMANDS = {"field": cmd_field, "constants": cmd_constants, "verify": cmd_verify,
            "eisenstein": cmd_eisenstein, "theta": cmd_theta}


def _read_config(path) -> dict:
    cp = configparser.ConfigParser()
    with open(path) as fh:
        cp.read_string("[arivol]\n" + fh.read())
    return dict(cp["arivol"])


def build_parser() -> argparse.ArgumentParser:
    from .specialvals import default_prec
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dF", type=int)
    common.add_argument("--DB")
    common.add_argument("--prec", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--json", action="store_true")
    common.add_argument("--mode", default="R")
    common.add_argument("--config")
    ap = argparse.ArgumentParser(prog="arivol", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "verify":
            sp.add_argument("--suite", default="all", choices=[*SUITES, "all"])
        if name == "eisenstein":
            sp.add_argument("--lattice", default="2,2")
            sp.add_argument("--nmax", type=int, default=8)
        if name == "theta":
            sp.add_argument("--samples", type=int, default=5)
    ap.set_defaults(_default_prec=default_prec)
    return ap


def _resolve(args):
    cfg = _read_config(args.config) if args.config else {}
    for key in ("prec", "seed"):
        if getattr(args, key) is None and key in cfg:
            try:
                setattr(args, key, int(cfg[key]))
            except ValueError as e:
                raise InvalidInput(f"config {key} must be an integer") from e
    if args.prec is None:
        try:
            args.prec = args._default_prec()
        except ValueError as e:
            raise InvalidInput("ARIVOL_PREC must be an integer") from e
    if args.seed is None:
        args.seed = 0
    if args.prec < 16:
        raise InvalidInput("--prec must be at least 16 bits")
    return args


def _print_text(rep: Report, out):
    d = rep.as_dict()
    print(f"{d['command']}  precision={rep.precision}  seed={rep.seed}", file=out)
    for r in d["results"]:
        v = r["value"]
        v = json.dumps(v) if isinstance(v, (list, dict)) else v
        tol = f"  tol={r['tolerance']}" if r["tolerance"] is not None else ""
        print(f"  [{r['status']}] {r['name']}" + (f" = {v}" if v is not None else "") + tol, file=out)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        args = _resolve(args)
        rep = COMMANDS[args.command](args)
    except (InvalidInput, OSError, configparser.Error) as e:
        print(f"arivol: invalid input: {e}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(rep.as_dict(), sort_keys=True, indent=2))
    else:
        _print_text(rep, sys.stdout)
    return 1 if rep.failed else 0


if __name__ == "__main__":
    sys.exit(main())
