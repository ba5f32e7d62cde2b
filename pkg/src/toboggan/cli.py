"""Command-line driver.

Every subcommand reads flags and, where it makes sense, a TOML or JSON run
configuration with the sections ``problem``, ``contour``, ``solver`` and
``output``.  Unknown sections or keys are rejected.  Exit status is 0 on
success, 2 on a configuration error and 3 on a solver failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np
import tomli
import tomli_w

from . import asympt, complexpath, eigensolve, exactsolv, qmetric, susy, xform
from .gaussian import GaussRational
from .odeint import IntegrationError, IntegratorConfig

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3


class ConfigError(ValueError):
    """Invalid configuration; ``where`` names the section or key."""

    def __init__(self, where: str, message: str):
        super().__init__(f"[{where}] {message}")
        self.where = where


def fmt(x) -> str:
    """Canonical float text: 12 significant digits, lowercase exponent."""
    return "%.12g" % float(x)


# configuration ----------------------------------------------------------------

@dataclass
class ProblemSection:
    terms: list = field(default_factory=lambda: [[1, 0, 2]])
    ell: Optional[str] = None
    centrifugal: Optional[str] = None
    map_m: int = 1


@dataclass
class ContourSection:
    kind: str = "shifted-line"
    epsilon: float = 0.5
    span: float = 20.0
    winding_n: int = 0
    rotation: str = "0"


@dataclass
class SolverSection:
    method: str = "shooting"
    window: list = field(default_factory=lambda: [0.0, 12.0])
    steps: int = 61
    refine_tol: float = 1e-10
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    grid_n: int = 400
    s_max: float = 8.0
    max_roots: int = 50


@dataclass
class OutputSection:
    format: str = "csv"
    path: str = ""


SECTIONS = {"problem": ProblemSection, "contour": ContourSection,
            "solver": SolverSection, "output": OutputSection}


@dataclass
class RunConfig:
    problem: ProblemSection = field(default_factory=ProblemSection)
    contour: ContourSection = field(default_factory=ContourSection)
    solver: SolverSection = field(default_factory=SolverSection)
    output: OutputSection = field(default_factory=OutputSection)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config", "top level must be a table")
        out = {}
        for name, value in d.items():
            if name not in SECTIONS:
                raise ConfigError(name, "unknown section")
            if not isinstance(value, dict):
                raise ConfigError(name, "section must be a table")
            klass = SECTIONS[name]
            known = {f.name: f for f in fields(klass)}
            for key in value:
                if key not in known:
                    raise ConfigError(f"{name}.{key}", "unknown key")
            try:
                out[name] = klass(**{k: _coerce(f"{name}.{k}", known[k], v) for k, v in value.items()})
            except TypeError as exc:
                raise ConfigError(name, str(exc)) from exc
        cfg = cls(**out)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        d = {}
        for name in SECTIONS:
            sec = getattr(self, name)
            d[name] = {f.name: getattr(sec, f.name) for f in fields(sec)
                       if getattr(sec, f.name) is not None}
        return d

    def to_toml(self) -> str:
        return tomli_w.dumps(self.to_dict())

    def validate(self):
        if self.contour.kind not in ("shifted-line", "winding"):
            raise ConfigError("contour.kind", "must be 'shifted-line' or 'winding'")
        if self.contour.epsilon <= 0:
            raise ConfigError("contour.epsilon", "must be positive")
        if self.solver.method not in ("shooting", "matrix", "both"):
            raise ConfigError("solver.method", "must be shooting, matrix or both")
        if len(self.solver.window) != 2 or self.solver.window[0] >= self.solver.window[1]:
            raise ConfigError("solver.window", "must be [lo, hi] with lo < hi")
        if self.output.format not in ("csv", "json"):
            raise ConfigError("output.format", "must be csv or json")
        if self.problem.map_m < 1:
            raise ConfigError("problem.map_m", "must be a positive integer")
        for t in self.problem.terms:
            if not (isinstance(t, (list, tuple)) and len(t) == 3):
                raise ConfigError("problem.terms", "each term is [re, im, power]")

    # model objects ---------------------------------------------------------

    def potential(self) -> xform.PotentialSpec:
        p = self.problem
        try:
            terms = [(GaussRational(_frac(re), _frac(im)), int(pw)) for re, im, pw in p.terms]
            ell = None if p.ell is None else _frac(p.ell)
            cf = 0 if p.centrifugal is None else _frac(p.centrifugal)
            return xform.PotentialSpec.from_terms(terms, ell=ell, centrifugal=cf)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError("problem", str(exc)) from exc

    def sturm(self) -> xform.SturmProblem:
        pot = self.potential()
        if self.problem.map_m == 1:
            return xform.plain(pot)
        return xform.rectify(pot, self.problem.map_m)

    def contour_spec(self) -> complexpath.ContourSpec:
        c = self.contour
        try:
            if c.kind == "winding":
                base = complexpath.ContourSpec.winding(c.winding_n, c.epsilon, c.span)
            else:
                base = complexpath.ContourSpec.shifted_line(c.epsilon, c.span)
            rot = Fraction(c.rotation)
            if rot % 1:
                base = complexpath.ContourSpec("rotated", parent=base, rotation=rot, span=c.span)
            return base
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError("contour", str(exc)) from exc


def _frac(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(repr(v))
    return Fraction(v)


def _coerce(where, f, v):
    t = f.type if isinstance(f.type, str) else getattr(f.type, "__name__", "")
    try:
        if t == "int":
            if isinstance(v, bool) or (isinstance(v, float) and not v.is_integer()):
                raise ValueError
            return int(v)
        if t == "float":
            if isinstance(v, bool):
                raise ValueError
            return float(v)
        if t == "str":
            if not isinstance(v, str):
                raise ValueError
            return v
        if t.startswith("Optional"):
            return None if v is None else str(v)
        if t == "list":
            if not isinstance(v, list):
                raise ValueError
            return v
    except (TypeError, ValueError):
        raise ConfigError(where, f"bad value {v!r}") from None
    return v


def load_config(path: Optional[str]) -> RunConfig:
    if not path:
        return RunConfig()
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from exc
    try:
        if p.suffix == ".json":
            data = json.loads(text)
        else:
            data = tomli.loads(text)
    except (json.JSONDecodeError, tomli.TOMLDecodeError) as exc:
        raise ConfigError("config", f"parse error: {exc}") from exc
    return RunConfig.from_dict(data)


# output --------------------------------------------------------------------

def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _table(header, rows, form: str) -> str:
    if form == "json":
        recs = [dict(zip(header, [float(v) if isinstance(v, (float, np.floating)) else v for v in r]))
                for r in rows]
        return json.dumps(recs, indent=1, sort_keys=True) + "\n"
    return _csv(header, rows)


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# subcommands ----------------------------------------------------------------

def cmd_wedges(args) -> str:
    p = args.power if args.power is not None else complexpath.wkb_power(args.degree)
    ws = complexpath.stokes_wedges(p, args.phase, include_growth=args.growth)
    pairs = complexpath.symmetric_pairs([w for w in ws if w.decay_flag])
    pair_of = {}
    for k, (a, b) in enumerate(pairs):
        pair_of[id(a)] = pair_of[id(b)] = k
    rows = [(w.center_angle, 2 * w.half_width, "decay" if w.decay_flag else "growth",
             pair_of.get(id(w), "")) for w in ws]
    return _table(["center", "width", "kind", "pair"], rows, args.format)


def cmd_rectify(args) -> str:
    cfg = load_config(args.config)
    if args.term:
        cfg.problem.terms = [_parse_term(t) for t in args.term]
    if args.ell is not None:
        cfg.problem.ell = args.ell
    if args.m is not None:
        cfg.problem.map_m = args.m
    cfg.validate()
    prob = cfg.sturm()
    if args.format == "json":
        return prob.to_json() + "\n"
    return prob.equation_text() + "\n"


def _parse_term(text: str) -> list:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError("--term", f"expected RE,IM,POWER, got {text!r}")
    try:
        return [str(Fraction(parts[0])), str(Fraction(parts[1])), int(parts[2])]
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError("--term", str(exc)) from exc


def _integrator(cfg: RunConfig) -> IntegratorConfig:
    return IntegratorConfig(rel_tol=cfg.solver.rel_tol, abs_tol=cfg.solver.abs_tol)


def cmd_spectrum(args) -> str:
    cfg = load_config(args.config)
    if args.method:
        cfg.solver.method = args.method
    if args.window:
        cfg.solver.window = list(args.window)
    if args.format_given:
        cfg.output.format = args.format
    if not args.out and cfg.output.path:
        args.out = cfg.output.path
    cfg.validate()
    prob = cfg.sturm()
    line = cfg.contour_spec()
    s = cfg.solver
    results = []
    if s.method in ("shooting", "both"):
        shoot = eigensolve.ShootingConfig(scan=(s.window[0], s.window[1], s.steps),
                                          refine_tol=s.refine_tol, max_roots=s.max_roots,
                                          integrator=_integrator(cfg), threads=args.threads)
        results.append(eigensolve.shoot_spectrum(prob, line, shoot))
    if s.method in ("matrix", "both"):
        lo, hi = s.window
        targets = list(np.linspace(lo, hi, 5))
        m = eigensolve.matrix_spectrum(prob, line, s.grid_n, targets, s_max=s.s_max, per_target=4)
        m.eigenvalues = [r for r in m.eigenvalues if lo <= r.E.real <= hi]
        results.append(m)
    if cfg.output.format == "json":
        return json.dumps([r.to_dict() for r in results], indent=1, sort_keys=True) + "\n"
    rows = []
    for r in results:
        for rec in r.eigenvalues:
            rows.append((rec.index, rec.E.real, rec.E.imag, rec.residual, r.method))
    return _csv(["index", "re_E", "im_E", "residual", "method"], rows)


def cmd_exact_check(args) -> str:
    rows = []
    for N in args.N:
        for M in range(1, args.M_max + 1):
            case = exactsolv.build_case(args.D, args.n, N, M)
            if case.nu.denominator == 1:
                cu = exactsolv.monodromy_limit(int(case.nu), case.m)[1]
            else:
                cu = exactsolv.monodromy_coefficients(case.nu, case.m)[1]
            ratio = ""
            if args.decay and case.bound:
                try:
                    ratio = exactsolv.continuation_check(case, kappa=args.kappa)
                except IntegrationError as exc:
                    print(f"N={N} M={M}: continuation skipped: {exc}", file=sys.stderr)
                    ratio = float("nan")
            rows.append((N, M, str(case.ell), str(case.nu), str(case.gamma),
                         int(case.bound), float(abs(cu)), ratio))
    return _table(["N", "M", "ell", "nu", "gamma", "bound_flag", "abs_c_unphysical", "decay_ratio"],
                  rows, args.format)


def _gamma_grid(lo, hi, step):
    lo_f, hi_f, st = Fraction(repr(lo)), Fraction(repr(hi)), Fraction(repr(step))
    if st <= 0:
        raise ConfigError("--step", "must be positive")
    k = math.floor(lo_f / st) + 1
    out = []
    while k * st < hi_f:
        out.append(k * st)
        k += 1
    return out


def cmd_susy_sweep(args) -> str:
    grid = _gamma_grid(args.gamma_min, args.gamma_max, args.step)
    cfg = susy.SweepConfig(epsilon=args.epsilon)
    rows = susy.sweep_gamma(chi=(0, 1), gamma_grid=grid, cfg=cfg)
    if args.format == "json":
        return json.dumps([{"gamma": r.gamma, "regime": r.regime, "expected": r.expected,
                            "upper": [x.real for x in r.upper],
                            "lower": [x.real for x in r.lower], "error": r.error}
                           for r in rows], indent=1) + "\n"
    return susy.sweep_csv(rows)


def cmd_asympt(args) -> str:
    header = ["N", "ell", "rho", "n", "E_estimate", "F_estimate"]
    if args.compare:
        header += ["E_shooting", "abs_error"]
    rows = []
    for N in args.N:
        for ell in args.ell:
            case = asympt.case_from_ell(N, ell)
            num = asympt.shooting_levels(case, tuple(range(args.levels))) if args.compare else None
            for n in range(args.levels):
                E = asympt.energy_estimate(case, n)
                rho, F = asympt.rescale_F(E, ell)
                row = [N, float(ell), rho, n, E, F]
                if num is not None:
                    row += [num[n].real, abs(num[n].real - E)]
                rows.append(row)
    return _table(header, rows, args.format)


def cmd_metric(args) -> str:
    if args.random:
        pencil = qmetric.random_dyson_pencil(args.random, args.seed)
    else:
        if not args.input:
            raise ConfigError("--in", "give a pencil file or --random DIM")
        try:
            pencil = qmetric.Pencil.from_json(Path(args.input).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("--in", str(exc)) from exc
        except qmetric.MetricError as exc:
            raise ConfigError("--in", str(exc)) from exc
    system = qmetric.solve_biorthogonal(pencil, args.right_scale)
    bundle = qmetric.assemble_theta(system, balance=not args.no_balance)
    rep = bundle.report()
    rep["completeness"] = qmetric.completeness_residual(system)
    rep["spectral_H"], rep["spectral_W"] = qmetric.spectral_residuals(system)
    rep["theta"] = qmetric.matrix_to_json(bundle.theta)
    if args.format == "json":
        return json.dumps(rep, indent=1, sort_keys=True) + "\n"
    keys = ["dieudonne_H", "dieudonne_W", "hermiticity", "orthogonality", "completeness",
            "spectral_H", "spectral_W", "min_eig_theta_W", "positive_definite"]
    return _csv(["quantity", "value"], [(k, rep[k]) for k in keys])


def cmd_fig(args) -> str:
    w = args.which
    if w == 1:
        ns = argparse.Namespace(power=None, degree=10, phase=0.0, growth=True, format=args.format)
        return cmd_wedges(ns)
    if w == 8:
        ns = argparse.Namespace(gamma_min=-3.0, gamma_max=2.0, step=0.05, epsilon=0.5,
                                format=args.format)
        return cmd_susy_sweep(ns)
    rows = []
    if w == 9:
        for N in range(9):
            for rho in np.geomspace(1e-6, 1e-3, 13):
                ell = 1.0 / math.sqrt(rho) - 0.5
                case = asympt.case_from_ell(N, ell)
                for n in range(4):
                    rows.append((N, float(rho), n, asympt.rescale_F(asympt.energy_estimate(case, n), ell)[1]))
        return _table(["N", "rho", "n", "F"], rows, args.format)
    if w == 10:
        for N in range(4):
            for rho in np.linspace(0.02, 1.0, 50):
                ell = 1.0 / math.sqrt(rho) - 0.5
                case = asympt.case_from_ell(N, ell)
                for n in range(5):
                    rows.append((N, float(rho), n, asympt.energy_estimate(case, n)))
        return _table(["N", "rho", "n", "E"], rows, args.format)
    raise ConfigError("--which", "figure must be 1, 8, 9 or 10")


# entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="toboggan", description="Tobogganic spectral toolkit")
    ap.add_argument("--seed", type=int, default=0, help="seed for random constructions")
    ap.add_argument("--threads", type=int, default=None,
                    help="worker threads (default: TOBOGGAN_THREADS or 1)")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config=False):
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        p.add_argument("--threads", type=int, default=argparse.SUPPRESS)
        if config:
            p.add_argument("--config", help="TOML or JSON run configuration")
        return p

    p = common(sub.add_parser("wedges", help="Stokes wedges of exp(-x**p/p)"))
    g = p.add_mutually_exclusive_group()
    g.add_argument("--power", type=float, help="growth power p")
    g.add_argument("--degree", type=float, default=10, help="potential degree K (p = (K+2)/2)")
    p.add_argument("--phase", type=float, default=0.0)
    p.add_argument("--growth", action="store_true", help="also list growth wedges")
    p.set_defaults(func=cmd_wedges)

    p = common(sub.add_parser("rectify", help="print the rectified Sturm equation"), config=True)
    p.add_argument("--term", action="append", help="monomial RE,IM,POWER (repeatable)")
    p.add_argument("--ell", help="angular index l (rational text)")
    p.add_argument("--m", type=int, help="map exponent")
    p.set_defaults(func=cmd_rectify)

    p = common(sub.add_parser("spectrum", help="eigenvalues by shooting and/or matrix"), config=True)
    p.add_argument("--method", choices=("shooting", "matrix", "both"))
    p.add_argument("--window", type=float, nargs=2)
    p.set_defaults(func=cmd_spectrum)

    p = common(sub.add_parser("exact-check", help="solvable-toboggan table"))
    p.add_argument("--N", type=int, nargs="+", default=[1])
    p.add_argument("--M-max", type=int, default=20)
    p.add_argument("--D", type=int, default=3)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--decay", action="store_true", help="run the numerical continuation check")
    p.set_defaults(func=cmd_exact_check)

    p = common(sub.add_parser("susy-sweep", help="partner spectra across gamma"))
    p.add_argument("--gamma-min", type=float, default=-3.0)
    p.add_argument("--gamma-max", type=float, default=2.0)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.set_defaults(func=cmd_susy_sweep)

    p = common(sub.add_parser("asympt", help="large-l closed form, optionally vs shooting"))
    p.add_argument("--N", type=int, nargs="+", default=[0, 1, 2])
    p.add_argument("--ell", type=float, nargs="+", default=[20.0])
    p.add_argument("--levels", type=int, default=2)
    p.add_argument("--compare", action="store_true")
    p.set_defaults(func=cmd_asympt)

    p = common(sub.add_parser("metric", help="metric of a finite pencil"))
    p.add_argument("--in", dest="input", help="pencil JSON {H: [[[re, im], ...]], W: ...}")
    p.add_argument("--random", type=int, metavar="DIM", help="use a seeded random Dyson pencil")
    p.add_argument("--right-scale", choices=("unit", "peak"), default="unit")
    p.add_argument("--no-balance", action="store_true", help="unit weights in the metric sum")
    p.set_defaults(func=cmd_metric)

    p = common(sub.add_parser("fig", help="data behind the figures"))
    p.add_argument("--which", type=int, required=True, choices=(1, 8, 9, 10))
    p.set_defaults(func=cmd_fig)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is None:
        args.threads = eigensolve.default_threads()
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_CONFIG
    args.format_given = args.format is not None
    if args.format is None:
        args.format = "csv"
    try:
        text = args.func(args)
        _emit(text, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (eigensolve.SolverError, IntegrationError, qmetric.MetricError,
            complexpath.ContourError) as exc:
        stage = getattr(exc, "stage", None)
        print(f"solver failure{f' ({stage})' if stage else ''}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
