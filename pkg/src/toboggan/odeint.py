"""Adaptive integration of ``-phi'' + Q(y) phi = 0`` along complex paths.

The second-order equation is written as the first-order system

    dphi/ds = y'(s) * chi,    dchi/ds = y'(s) * Q(y(s)) * phi

with ``chi = dphi/dy`` and advanced with the Dormand-Prince 5(4) pair.
``Q`` is restricted to the Laurent-polynomial form used throughout the
package,

    Q(y) = sum_k c_k y**p_k  -  E * w * y**q,

and paths are chains of segments ``y(s) = c0 + c1 * (eps + i*s)**a``.  Both
choices let the inner loop run under numba without Python callbacks.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numba
import numpy as np

from .complexpath import ContourSpec


class IntegrationError(RuntimeError):
    """Step-size underflow or step budget exhaustion."""

    def __init__(self, message, s=None, stage=None):
        super().__init__(message)
        self.s = s
        self.stage = stage


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = 0.5
    min_step: float = 1e-13
    max_steps: int = 5_000_000

    def __post_init__(self):
        if not (0 < self.min_step < self.max_step):
            raise ValueError("need 0 < min_step < max_step")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class OdeState:
    s: float
    y: complex
    phi: complex
    dphi: complex
    log_scale: float = 0.0

    def scaled(self) -> tuple[complex, complex]:
        """``(phi, dphi)`` with the accumulated scale restored (may overflow)."""
        f = math.exp(self.log_scale)
        return self.phi * f, self.dphi * f


@dataclass(frozen=True)
class Segment:
    """``y(s) = c0 + c1 * (eps + i*s)**a`` for ``s`` in ``[s_from, s_to]``."""

    c0: complex
    c1: complex
    eps: float
    a: float
    s_from: float
    s_to: float

    @classmethod
    def line(cls, y0: complex, y1: complex) -> "Segment":
        """Straight segment parametrized by ``s`` in ``[0, 1]``."""
        return cls(complex(y0), -1j * (complex(y1) - complex(y0)), 0.0, 1.0, 0.0, 1.0)

    @classmethod
    def on_contour(cls, contour: ContourSpec, s_from: float, s_to: float) -> "Segment":
        c, eps, a = contour.power_form()
        return cls(0j, complex(c), float(eps), float(a), float(s_from), float(s_to))

    def point(self, s):
        z = self.eps + 1j * np.asarray(s, dtype=float)
        return self.c0 + self.c1 * z ** self.a

    def derivative(self, s):
        z = self.eps + 1j * np.asarray(s, dtype=float)
        return 1j * self.a * self.c1 * z ** (self.a - 1)


@dataclass
class Trajectory:
    """Result of one integration."""

    state: OdeState
    n_steps: int
    log_max_abs: float
    dense: Optional[np.ndarray] = None  # columns s, y, phi, log_scale

    def to_csv(self, path) -> None:
        if self.dense is None:
            raise ValueError("no dense output recorded")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "re_y", "im_y", "re_phi", "im_phi", "log_scale"])
            for s, y, phi, ls in self.dense:
                w.writerow([f"{s.real:.12g}", f"{y.real:.12g}", f"{y.imag:.12g}",
                            f"{phi.real:.12g}", f"{phi.imag:.12g}", f"{ls.real:.12g}"])


# compiled kernel -----------------------------------------------------------

@numba.njit(cache=True, nogil=True)
def _ipow(y, p):
    if p == 0:
        return 1.0 + 0.0j
    neg = p < 0
    k = -p if neg else p
    out = 1.0 + 0.0j
    b = y
    while k:
        if k & 1:
            out *= b
        b *= b
        k >>= 1
    return 1.0 / out if neg else out


@numba.njit(cache=True, nogil=True)
def _zpow(z, a):
    ai = int(a)
    if ai == a:
        return _ipow(z, ai)
    return np.exp(a * np.log(z))


@numba.njit(cache=True, nogil=True)
def _q(y, cs, ps, ew, wp):
    acc = 0.0j
    for k in range(cs.shape[0]):
        acc += cs[k] * _ipow(y, ps[k])
    return acc - ew * _ipow(y, wp)


@numba.njit(cache=True, nogil=True)
def _rhs(s, phi, chi, cs, ps, ew, wp, c0, c1, eps, a):
    z = eps + 1j * s
    y = c0 + c1 * _zpow(z, a)
    dy = 1j * a * c1 * _zpow(z, a - 1.0)
    return dy * chi, dy * _q(y, cs, ps, ew, wp) * phi


# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (71 / 57600, -71 / 16695, 71 / 1920,
                                -17253 / 339200, 22 / 525, -1 / 40)


@numba.njit(cache=True, nogil=True)
def _dp45(cs, ps, ew, wp, c0, c1, eps, a, s0, s1, phi, chi, log_scale,
          rtol, atol, hmax, hmin, max_steps, fixed_h, dense_cap):
    """Returns (phi, chi, log_scale, status, n_steps, log_max, dense, n_dense).

    status: 0 ok, 1 step underflow, 2 step budget exhausted, 3 non-finite.
    """
    span = s1 - s0
    direction = 1.0 if span >= 0 else -1.0
    dense = np.empty((dense_cap, 4), dtype=np.complex128)
    nd = 0
    s = s0
    lm = math.log(max(abs(phi), 1e-300)) + log_scale
    if dense_cap > 0:
        dense[0, 0] = s
        dense[0, 1] = c0 + c1 * _zpow(eps + 1j * s, a)
        dense[0, 2] = phi
        dense[0, 3] = log_scale
        nd = 1
    if span == 0.0:
        return phi, chi, log_scale, 0, 0, lm, dense, nd
    if fixed_h > 0:
        h = min(fixed_h, abs(span))
    else:
        z = eps + 1j * s
        y = c0 + c1 * _zpow(z, a)
        dy = abs(a * c1 * _zpow(z, a - 1.0))
        qq = abs(_q(y, cs, ps, ew, wp))
        h = min(hmax, abs(span) / 100.0, 0.05 / max(dy * math.sqrt(max(qq, 1.0)), 1e-12))
        h = max(h, 10 * hmin)
    k1p, k1c = _rhs(s, phi, chi, cs, ps, ew, wp, c0, c1, eps, a)
    n = 0
    while direction * (s1 - s) > 1e-15 * max(1.0, abs(s1)):
        if n >= max_steps:
            return phi, chi, log_scale, 2, n, lm, dense, nd
        hs = direction * min(h, direction * (s1 - s))
        k2p, k2c = _rhs(s + _C2 * hs, phi + hs * _A21 * k1p, chi + hs * _A21 * k1c,
                        cs, ps, ew, wp, c0, c1, eps, a)
        k3p, k3c = _rhs(s + _C3 * hs, phi + hs * (_A31 * k1p + _A32 * k2p),
                        chi + hs * (_A31 * k1c + _A32 * k2c), cs, ps, ew, wp, c0, c1, eps, a)
        k4p, k4c = _rhs(s + _C4 * hs, phi + hs * (_A41 * k1p + _A42 * k2p + _A43 * k3p),
                        chi + hs * (_A41 * k1c + _A42 * k2c + _A43 * k3c),
                        cs, ps, ew, wp, c0, c1, eps, a)
        k5p, k5c = _rhs(s + _C5 * hs,
                        phi + hs * (_A51 * k1p + _A52 * k2p + _A53 * k3p + _A54 * k4p),
                        chi + hs * (_A51 * k1c + _A52 * k2c + _A53 * k3c + _A54 * k4c),
                        cs, ps, ew, wp, c0, c1, eps, a)
        k6p, k6c = _rhs(s + hs,
                        phi + hs * (_A61 * k1p + _A62 * k2p + _A63 * k3p + _A64 * k4p + _A65 * k5p),
                        chi + hs * (_A61 * k1c + _A62 * k2c + _A63 * k3c + _A64 * k4c + _A65 * k5c),
                        cs, ps, ew, wp, c0, c1, eps, a)
        np_ = phi + hs * (_B1 * k1p + _B3 * k3p + _B4 * k4p + _B5 * k5p + _B6 * k6p)
        nc_ = chi + hs * (_B1 * k1c + _B3 * k3c + _B4 * k4c + _B5 * k5c + _B6 * k6c)
        k7p, k7c = _rhs(s + hs, np_, nc_, cs, ps, ew, wp, c0, c1, eps, a)
        if fixed_h > 0:
            err = 0.0
        else:
            ep = hs * (_E1 * k1p + _E3 * k3p + _E4 * k4p + _E5 * k5p + _E6 * k6p + _E7 * k7p)
            ec = hs * (_E1 * k1c + _E3 * k3c + _E4 * k4c + _E5 * k5c + _E6 * k6c + _E7 * k7c)
            sp = atol + rtol * max(abs(phi), abs(np_))
            sc = atol + rtol * max(abs(chi), abs(nc_))
            err = math.sqrt(0.5 * ((abs(ep) / sp) ** 2 + (abs(ec) / sc) ** 2))
            if not math.isfinite(err):
                err = 1e10
        if err <= 1.0:
            s = s + hs
            phi, chi = np_, nc_
            k1p, k1c = k7p, k7c
            n += 1
            big = max(abs(phi), abs(chi))
            if not math.isfinite(big):
                return phi, chi, log_scale, 3, n, lm, dense, nd
            if big > 1e100 or (big < 1e-100 and big > 0):
                phi /= big
                chi /= big
                k1p /= big
                k1c /= big
                log_scale += math.log(big)
            cur = math.log(max(abs(phi), 1e-300)) + log_scale
            if cur > lm:
                lm = cur
            if nd < dense_cap:
                dense[nd, 0] = s
                dense[nd, 1] = c0 + c1 * _zpow(eps + 1j * s, a)
                dense[nd, 2] = phi
                dense[nd, 3] = log_scale
                nd += 1
            if fixed_h > 0:
                continue
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h = min(hmax, abs(hs) * fac)
        else:
            h = abs(hs) * max(0.2, 0.9 * err ** -0.2)
            if h < hmin:
                return phi, chi, log_scale, 1, n, lm, dense, nd
    return phi, chi, log_scale, 0, n, lm, dense, nd


# public API ----------------------------------------------------------------

def _coefficients(Q):
    """Normalize the potential description to ``(cs, ps, w, q)`` arrays."""
    if hasattr(Q, "numeric"):
        out = Q.numeric()
        if len(out) == 2:
            cs, ps = out
            return cs, ps, 0j, 0
        return out
    cs, ps, w, q = Q
    return (np.asarray(cs, dtype=np.complex128), np.asarray(ps, dtype=np.int64),
            complex(w), int(q))


def laurent(terms: Sequence[tuple[complex, int]], weight: tuple[complex, int] = (1.0, 0)):
    """Build the ``Q`` tuple from plain ``(coefficient, power)`` pairs."""
    cs = np.array([complex(c) for c, _ in terms] or [0j], dtype=np.complex128)
    ps = np.array([int(p) for _, p in terms] or [0], dtype=np.int64)
    return cs, ps, complex(weight[0]), int(weight[1])


def q_value(Q, y, E):
    """Evaluate ``Q(y, E)`` in Python (vectorized)."""
    cs, ps, w, q = _coefficients(Q)
    y = np.asarray(y, dtype=complex)
    out = np.zeros_like(y)
    for c, p in zip(cs, ps):
        out = out + c * y ** int(p)
    return out - E * w * y ** q


def _run(Q, E, seg: Segment, s_from, s_to, phi, chi, log_scale, cfg, fixed_h, dense_cap):
    cs, ps, w, q = _coefficients(Q)
    return _dp45(np.ascontiguousarray(cs, dtype=np.complex128),
                 np.ascontiguousarray(ps, dtype=np.int64), complex(E) * complex(w), int(q),
                 complex(seg.c0), complex(seg.c1), float(seg.eps), float(seg.a),
                 float(s_from), float(s_to), complex(phi), complex(chi), float(log_scale),
                 cfg.rel_tol, cfg.abs_tol, cfg.max_step, cfg.min_step, cfg.max_steps,
                 float(fixed_h), int(dense_cap))


def integrate_along(path, Q, E: complex, s_from: float, s_to: float, init: OdeState,
                    cfg: IntegratorConfig = IntegratorConfig(), *, dense: bool = False,
                    fixed_step: float = 0.0, dense_capacity: int = 200_000,
                    stage: str | None = None) -> Trajectory:
    """Continue ``(phi, dphi)`` along a contour or segment from ``s_from`` to ``s_to``.

    Parameters
    ----------
    path : ContourSpec or Segment
        Path in closed power form.
    Q : SturmProblem, PotentialSpec or ``(cs, ps, w, q)`` tuple
        Laurent description of ``Q(y, E) = sum c y**p - E w y**q``.
    E : complex
        Spectral parameter.
    s_from, s_to : float
        Parameter range; ``init.s`` must equal ``s_from``.
    init : OdeState
        Initial values, ``dphi`` being the derivative with respect to ``y``.
    cfg : IntegratorConfig
    dense : bool
        Record every accepted step (up to ``dense_capacity``).
    fixed_step : float
        Disable error control and use this step in ``s``.

    Returns
    -------
    Trajectory
    """
    if abs(init.s - s_from) > 1e-12 * max(1.0, abs(s_from)):
        raise ValueError("initial state is not at s_from")
    seg = path if isinstance(path, Segment) else Segment.on_contour(path, s_from, s_to)
    res = _run(Q, E, seg, s_from, s_to, init.phi, init.dphi, init.log_scale, cfg,
               fixed_step, dense_capacity if dense else 0)
    phi, chi, ls, status, n, lm, buf, nd = res
    if status == 1:
        raise IntegrationError("step size underflow", stage=stage)
    if status == 2:
        raise IntegrationError("step budget exhausted", stage=stage)
    if status == 3:
        raise IntegrationError("non-finite solution", stage=stage)
    y_end = complex(seg.point(s_to))
    return Trajectory(OdeState(float(s_to), y_end, complex(phi), complex(chi), float(ls)),
                      int(n), float(lm), buf[:nd].copy() if dense else None)


def integrate_segments(segments: Sequence[Segment], Q, E: complex, phi0: complex,
                       dphi0: complex, cfg: IntegratorConfig = IntegratorConfig()) -> OdeState:
    """Chain integrations over consecutive segments (each from ``s_from`` to ``s_to``)."""
    phi, chi, ls = complex(phi0), complex(dphi0), 0.0
    for k, seg in enumerate(segments):
        init = OdeState(seg.s_from, complex(seg.point(seg.s_from)), phi, chi, ls)
        tr = integrate_along(seg, Q, E, seg.s_from, seg.s_to, init, cfg, stage=f"segment {k}")
        phi, chi, ls = tr.state.phi, tr.state.dphi, tr.state.log_scale
    last = segments[-1]
    return OdeState(last.s_to, complex(last.point(last.s_to)), phi, chi, ls)


def wkb_seed(Q, E: complex, y_far: complex, outgoing_direction: complex, s: float = 0.0,
             guard: float | None = 25.0) -> OdeState:
    """Seed the solution that decays when continued along ``outgoing_direction``.

    ``phi = Q**(-1/4)`` and ``dphi = -sqrt(Q) * phi`` with the root chosen so
    that ``Re(sqrt(Q) * direction) > 0``.
    """
    q = complex(q_value(Q, y_far, E))
    if guard is not None and abs(q) <= guard * max(1.0, abs(E)):
        raise ValueError(f"|Q| = {abs(q):.3g} too small for an asymptotic seed")
    r = np.sqrt(q)
    d = complex(outgoing_direction)
    d = d / abs(d)
    proj = (r * d).real
    if abs(proj) < 1e-6 * abs(r):
        raise ValueError("decaying and growing branches are indistinguishable here")
    if proj < 0:
        r = -r
    phi = 1.0 / np.sqrt(r)
    return OdeState(float(s), complex(y_far), complex(phi), complex(-r * phi), 0.0)


def wronskian(a: OdeState, b: OdeState) -> complex:
    """``phi_a dphi_b - phi_b dphi_a`` in the unscaled frame of both states."""
    w = a.phi * b.dphi - b.phi * a.dphi
    return w * math.exp(a.log_scale + b.log_scale) if (a.log_scale or b.log_scale) else w
