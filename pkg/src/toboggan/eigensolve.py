"""Discrete spectra of Sturm-Schroedinger problems on complex contours.

Two independent routes are provided.

* Shooting: seed the decaying WKB solution on both arms of the contour,
  integrate to the matching point and locate zeros of the normalized
  Wronskian mismatch.
* Matrix oracle: second-order finite differences in the path parameter give
  a sparse pencil ``A v = E B v``; shift-invert Arnoldi (ARPACK) finds the
  eigenvalues nearest each requested shift, and two grids give a
  Richardson-extrapolated value with an error estimate.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .complexpath import ContourSpec
from .odeint import (IntegrationError, IntegratorConfig, OdeState, Segment,
                     integrate_along, q_value, wkb_seed)
from .xform import PotentialSpec, SturmProblem, plain


class SolverError(RuntimeError):
    """Failure inside a spectral solver, tagged with the failing stage."""

    def __init__(self, message, stage=None):
        super().__init__(f"{stage}: {message}" if stage else message)
        self.stage = stage


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("TOBOGGAN_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class ShootingConfig:
    """Parameters of the shooting solver.

    ``s_far = None`` selects the seeding point per energy (see
    :func:`far_parameter`).
    """

    s_match: float = 0.0
    s_far: Optional[float] = None
    scan: tuple = (0.0, 10.0, 101)
    refine_tol: float = 1e-10
    max_roots: int = 50
    accept_tol: float = 1e-7
    integrator: IntegratorConfig = IntegratorConfig()
    threads: int = field(default_factory=default_threads)
    action: float = 20.0

    def __post_init__(self):
        if int(self.scan[2]) < 2:
            raise ValueError("scan needs at least two steps")
        if self.refine_tol <= 0:
            raise ValueError("refine_tol must be positive")
        if self.s_far is not None and self.s_far <= self.s_match:
            raise ValueError("s_far must exceed s_match")


@dataclass(frozen=True)
class EigenRecord:
    E: complex
    residual: float
    index: int
    error_estimate: Optional[float] = None


@dataclass
class Eigenresult:
    eigenvalues: list
    method: str
    problem_hash: str
    contour: ContourSpec
    escaped: list = field(default_factory=list)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.E for r in self.eigenvalues], dtype=complex)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "problem_hash": self.problem_hash,
            "contour": self.contour.to_dict(),
            "eigenvalues": [
                {"index": r.index, "re_E": r.E.real, "im_E": r.E.imag,
                 "residual": r.residual, "error_estimate": r.error_estimate}
                for r in self.eigenvalues
            ],
            "escaped": [[e.real, e.imag] for e in self.escaped],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "re_E", "im_E", "residual", "method"])
        for r in self.eigenvalues:
            w.writerow([r.index, f"{r.E.real:.12g}", f"{r.E.imag:.12g}",
                        f"{r.residual:.12g}", self.method])
        return buf.getvalue()


def problem_hash(problem: SturmProblem) -> str:
    return hashlib.sha1(problem.to_json().encode()).hexdigest()[:16]


def as_sturm(problem) -> SturmProblem:
    return problem if isinstance(problem, SturmProblem) else plain(problem)


# seeding -----------------------------------------------------------------

def far_parameter(problem: SturmProblem, contour: ContourSpec, E: complex, side: int,
                  s_match: float = 0.0, action: float = 20.0) -> float:
    """Seeding parameter on one arm (``side = +1`` right, ``-1`` left).

    The larger of the smallest ``|s|`` beyond which ``|Q| > 25 (1 + |E|)``
    and the point where the WKB action measured from there exceeds
    ``action``; capped at the contour's span.
    """
    S = contour.span
    s = s_match + side * np.linspace(0.0, S - abs(s_match), 4001)
    y, dy = contour.evaluate(s)
    q = q_value(problem.numeric(), y, E)
    big = np.abs(q) > 25.0 * (1.0 + abs(E))
    if not big[-1]:
        return side * S
    bad = np.nonzero(~big)[0]
    i0 = bad[-1] + 1 if bad.size else 0
    integrand = np.abs((np.sqrt(q) * dy).real)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.abs(np.diff(s)))])
    cum = cum - cum[i0]
    hit = np.nonzero((cum >= action) & (np.arange(len(s)) >= i0))[0]
    i1 = hit[0] if hit.size else len(s) - 1
    return float(s[max(i0, i1)])


class _Shooter:
    """Mismatch evaluator with the seeding points frozen."""

    def __init__(self, problem: SturmProblem, contour: ContourSpec, cfg: ShootingConfig,
                 E_ref: complex):
        self.problem = problem
        self.contour = contour
        self.cfg = cfg
        self.Q = problem.numeric()
        if cfg.s_far is not None:
            self.sL, self.sR = -cfg.s_far, cfg.s_far
        else:
            self.sL = far_parameter(problem, contour, E_ref, -1, cfg.s_match, cfg.action)
            self.sR = far_parameter(problem, contour, E_ref, +1, cfg.s_match, cfg.action)

    def arm(self, E, s_far, side):
        y, dy = self.contour.evaluate(s_far)
        direction = dy if side > 0 else -dy
        stage = "right arm" if side > 0 else "left arm"
        try:
            seed = wkb_seed(self.Q, E, y, direction, s=s_far, guard=None)
            tr = integrate_along(self.contour, self.Q, E, s_far, self.cfg.s_match, seed,
                                 self.cfg.integrator, stage=stage)
        except (IntegrationError, ValueError) as exc:
            raise SolverError(str(exc), stage=stage) from exc
        return tr.state

    def wronskian(self, E):
        L = self.arm(E, self.sL, -1)
        R = self.arm(E, self.sR, +1)
        t1 = L.phi * R.dphi
        t2 = R.phi * L.dphi
        den = abs(t1) + abs(t2)
        return t1 - t2, L.log_scale + R.log_scale, (t1 - t2) / den if den else 0j


def mismatch(problem, contour: ContourSpec, E: complex, cfg: ShootingConfig = ShootingConfig(),
             swap: bool = False) -> complex:
    """Normalized Wronskian mismatch ``D(E)`` between the two decaying arms."""
    sh = _Shooter(as_sturm(problem), contour, cfg, E)
    if swap:
        sh.sL, sh.sR = -sh.sR, -sh.sL
        L = sh.arm(E, -sh.sL, +1)
        R = sh.arm(E, -sh.sR, -1)
        t1, t2 = L.phi * R.dphi, R.phi * L.dphi
        return (t1 - t2) / (abs(t1) + abs(t2))
    return sh.wronskian(E)[2]


def _secant(f, E0, E1, tol, maxit=60):
    f0, f1 = f(E0), f(E1)
    for _ in range(maxit):
        if f1 == f0:
            break
        E2 = E1 - f1 * (E1 - E0) / (f1 - f0)
        if not np.isfinite(E2):
            break
        E0, f0 = E1, f1
        E1, f1 = E2, f(E2)
        if abs(E1 - E0) < tol * (1 + abs(E1)):
            return E1
    return E1


def _map(fn, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def refine_root(problem, contour, E0: complex, cfg: ShootingConfig = ShootingConfig(),
                E1: complex | None = None) -> tuple[complex, float]:
    """Complex-secant refinement of one eigenvalue; returns ``(E, |D(E)|)``."""
    problem = as_sturm(problem)
    sh = _Shooter(problem, contour, cfg, E0)
    ref = {}

    def f(E):
        w, ls, _ = sh.wronskian(E)
        if "ls" not in ref:
            ref["ls"] = ls
        return w * math.exp(ls - ref["ls"])

    if E1 is None:
        E1 = E0 + 1e-4 * (1 + abs(E0))
    delta = abs(complex(E1) - complex(E0))
    E = _secant(f, complex(E0), complex(E1), cfg.refine_tol)
    # re-seed at the converged energy and polish once more
    sh = _Shooter(problem, contour, cfg, E)
    ref.clear()
    E = _secant(f, E, E + 1e-3 * delta, cfg.refine_tol)
    return complex(E), float(abs(sh.wronskian(E)[2]))


def shoot_spectrum(problem, contour: ContourSpec, cfg: ShootingConfig = ShootingConfig()) -> Eigenresult:
    """Scan the real window, bracket, refine and deflate.

    Returns
    -------
    Eigenresult
        Sorted by real part; roots that converged outside the window are
        listed in ``escaped``.
    """
    problem = as_sturm(problem)
    lo, hi, n = float(cfg.scan[0]), float(cfg.scan[1]), int(cfg.scan[2])
    grid = np.linspace(lo, hi, n)

    def D(E):
        try:
            return _Shooter(problem, contour, cfg, E).wronskian(E)[2]
        except SolverError:
            return np.nan + 0j

    d = np.array(_map(D, grid, cfg.threads))
    ok = np.isfinite(d)
    if not ok.any():
        raise SolverError("mismatch undefined on the whole window", stage="scan")
    first = d[np.argmax(ok)]
    rot = np.conj(first) / abs(first) if abs(first) else 1.0
    re = (d * rot).real
    mag = np.abs(d)
    cands = []
    for i in range(n - 1):
        if ok[i] and ok[i + 1] and re[i] * re[i + 1] < 0:
            t = re[i] / (re[i] - re[i + 1])
            cands.append(grid[i] + t * (grid[i + 1] - grid[i]))
    for i in range(1, n - 1):
        if ok[i] and mag[i] <= mag[i - 1] and mag[i] <= mag[i + 1] and mag[i] < 0.5:
            cands.append(grid[i])
    step = (hi - lo) / (n - 1)

    def refine(c):
        try:
            return refine_root(problem, contour, c, cfg, c + 0.05 * step)
        except SolverError:
            return None

    found = [r for r in _map(refine, cands, cfg.threads) if r is not None]
    roots, escaped = [], []
    for E, res in sorted(found, key=lambda t: (t[0].real, t[0].imag)):
        if not (np.isfinite(E) and res < cfg.accept_tol):
            continue
        if any(abs(E - r) < 1e-6 * (1 + abs(E)) for r, _ in roots + escaped):
            continue
        if lo - 1e-9 <= E.real <= hi + 1e-9:
            roots.append((E, res))
        else:
            escaped.append((E, res))
    roots = roots[: cfg.max_roots]
    recs = [EigenRecord(E, res, k) for k, (E, res) in enumerate(roots)]
    return Eigenresult(recs, "shooting", problem_hash(problem), contour,
                       [E for E, _ in escaped])


# matrix oracle --------------------------------------------------------------

def _pencil(problem: SturmProblem, contour: ContourSpec, n: int, s_max: float):
    h = 2.0 * s_max / (n + 1)
    s = -s_max + h * np.arange(1, n + 1)
    c, eps, a = contour.power_form()
    z = eps + 1j * s
    y = c * z ** a
    dy = 1j * a * c * z ** (a - 1)
    d2y = -a * (a - 1) * c * z ** (a - 2)
    cs, ps, wc, wp = problem.numeric()
    V = np.zeros(n, dtype=complex)
    for ck, pk in zip(cs, ps):
        V += ck * y ** int(pk)
    W = wc * y ** wp
    f2 = -1.0 / dy ** 2
    f1 = d2y / dy ** 3
    main = -2.0 * f2 / h ** 2 + V
    up = f2[:-1] / h ** 2 + f1[:-1] / (2 * h)
    low = f2[1:] / h ** 2 - f1[1:] / (2 * h)
    A = sp.diags([low, main, up], [-1, 0, 1], format="csc", dtype=complex)
    return A, W, h


def _nearest_eigs(A, W, targets, k):
    Wabs = np.abs(W)
    if Wabs.min() == 0 or Wabs.max() / Wabs.min() > 1e12:
        raise SolverError("weight matrix is singular to working precision", stage="pencil")
    C = sp.diags(1.0 / W) @ A
    C = C.tocsc()
    out = []
    for sigma in targets:
        try:
            vals = spla.eigs(C, k=min(k, C.shape[0] - 2), sigma=complex(sigma),
                             which="LM", return_eigenvectors=False, tol=1e-13)
        except spla.ArpackNoConvergence as exc:
            vals = exc.eigenvalues
        out.append(np.asarray(vals))
    return out


def matrix_spectrum(problem, contour: ContourSpec, grid_n: int = 400, targets: Sequence[complex] = (0.0,),
                    s_max: float | None = None, per_target: int = 1) -> Eigenresult:
    """Finite-difference oracle with Richardson extrapolation.

    Parameters
    ----------
    problem : SturmProblem or PotentialSpec
    contour : ContourSpec
        Sampled uniformly in ``s`` over ``[-s_max, s_max]`` with Dirichlet ends.
    grid_n : int
        Interior points of the coarse grid; the fine grid has ``2*grid_n + 1``.
    targets : sequence of complex
        Shifts; the ``per_target`` nearest eigenvalues of each are kept.
    s_max : float, optional
        Truncation; defaults to the seeding rule at the largest target.

    Returns
    -------
    Eigenresult
        Extrapolated eigenvalues; ``error_estimate`` is ``|E_fine - E_coarse| / 3``
        and ``residual`` the same number.
    """
    if grid_n < 50:
        raise ValueError("grid_n must be at least 50")
    problem = as_sturm(problem)
    targets = list(targets)
    if s_max is None:
        Emax = max(targets, key=abs) if targets else 0.0
        s_max = max(abs(far_parameter(problem, contour, Emax, -1)),
                    abs(far_parameter(problem, contour, Emax, +1)))
    A1, W1, _ = _pencil(problem, contour, grid_n, s_max)
    A2, W2, _ = _pencil(problem, contour, 2 * grid_n + 1, s_max)
    k = max(per_target, 1) + 2
    e1 = _nearest_eigs(A1, W1, targets, k)
    e2 = _nearest_eigs(A2, W2, targets, k)
    recs = []
    for sigma, v1, v2 in zip(targets, e1, e2):
        v2 = v2[np.argsort(np.abs(v2 - sigma))][:per_target]
        for Ef in v2:
            Ec = v1[np.argmin(np.abs(v1 - Ef))]
            Er = (4 * Ef - Ec) / 3
            est = abs(Ef - Ec) / 3
            recs.append((complex(Er), float(est)))
    recs.sort(key=lambda t: (t[0].real, t[0].imag))
    uniq = []
    for E, est in recs:
        if any(abs(E - u) < 1e-6 * (1 + abs(E)) for u, _ in uniq):
            continue
        uniq.append((E, est))
    out = [EigenRecord(E, est, i, est) for i, (E, est) in enumerate(uniq)]
    return Eigenresult(out, "matrix", problem_hash(problem), contour)


def harmonic_problem() -> SturmProblem:
    """``-phi'' + y**2 phi = E phi``."""
    return plain(PotentialSpec.from_terms([(1, 2)]))
