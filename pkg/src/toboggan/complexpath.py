"""Complex integration contours for tobogganic problems.

Every contour here is a parametrized curve ``s -> x(s)`` over the real line.
Four kinds are supported:

``shifted-line``
    ``x(s) = s - i*eps``, the regularized real line passing below the
    branch point at the origin.
``winding``
    ``x(s) = -i * [i*(s - i*eps)]**(2N+1)``, a spiral encircling the
    origin by the total angle ``(2N+1)*pi``.
``pullback``
    the preimage ``y(s) = -i * [i*x(s)]**(1/m)`` of a parent contour under
    the rectifying map ``i*x = (i*y)**m``.  The m-th root is tracked by
    continuity along ``s`` and anchored so that ``y(0)`` lies in the lower
    half-plane.
``rotated``
    the parent contour multiplied pointwise by ``exp(2*pi*i*rotation)``.

All kinds reduce to the closed form ``y(s) = c * (eps + i*s)**a`` with the
principal power (``eps + i*s`` never leaves the right half-plane), which is
what the integrators use.  The branch-tracked evaluation of pullbacks is kept
as an independent route and the two are cross-checked in the tests.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

KINDS = ("shifted-line", "winding", "pullback", "rotated")

#: Contours sample within this distance of the origin are rejected.
ORIGIN_GUARD = 1e-12


class ContourError(ValueError):
    """Raised for contours that hit the branch point or are malformed."""


def unit_root(turns: Fraction) -> complex:
    """``exp(2*pi*i*turns)``, exact when ``turns`` is a multiple of 1/4."""
    t = Fraction(turns) % 1
    exact = {Fraction(0): 1 + 0j, Fraction(1, 4): 1j,
             Fraction(1, 2): -1 + 0j, Fraction(3, 4): -1j}
    if t in exact:
        return exact[t]
    ang = 2.0 * math.pi * float(t)
    return complex(math.cos(ang), math.sin(ang))


@dataclass(frozen=True)
class ContourSpec:
    """Immutable description of one parametrized complex path."""

    kind: str
    epsilon: float = 0.5
    winding_n: int = 0
    rotation: Fraction = Fraction(0)
    parent: Optional["ContourSpec"] = None
    map_m: int = 1
    span: float = 20.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContourError(f"unknown contour kind {self.kind!r}")
        object.__setattr__(self, "rotation", Fraction(self.rotation) % 1)
        if self.kind in ("pullback", "rotated"):
            if self.parent is None:
                raise ContourError(f"{self.kind} contour needs a parent")
            object.__setattr__(self, "epsilon", self.parent.epsilon)
        if not self.epsilon > 0:
            raise ContourError("epsilon must be positive")
        if self.winding_n < 0:
            raise ContourError("winding number must be non-negative")
        if self.map_m < 1:
            raise ContourError("map exponent must be a positive integer")
        if self.kind == "pullback":
            # validates the anchor
            self.power_form()

    # constructors -------------------------------------------------------

    @classmethod
    def shifted_line(cls, epsilon: float = 0.5, span: float = 20.0) -> "ContourSpec":
        return cls("shifted-line", epsilon=epsilon, span=span)

    @classmethod
    def winding(cls, n: int, epsilon: float = 0.5, span: float = 20.0) -> "ContourSpec":
        return cls("winding", epsilon=epsilon, winding_n=n, span=span)

    # closed form --------------------------------------------------------

    def power_form(self) -> tuple[complex, float, float]:
        """Return ``(c, eps, a)`` with ``y(s) = c * (eps + i*s)**a``."""
        if self.kind == "shifted-line":
            return -1j, self.epsilon, 1.0
        if self.kind == "winding":
            return -1j, self.epsilon, float(2 * self.winding_n + 1)
        c, eps, a = self.parent.power_form()
        if self.kind == "rotated":
            return c * unit_root(self.rotation), eps, a
        m = self.map_m
        w = 1j * c
        base = abs(w) ** (1.0 / m)
        phase = np.angle(w) / m
        roots = [base * np.exp(1j * (phase + 2 * np.pi * k / m)) for k in range(m)]
        best = max(roots, key=lambda r: r.real)
        if best.real <= 1e-12 * base:
            raise ContourError("pullback anchor is not in the lower half-plane")
        return -1j * complex(best), eps, a / m

    def closed_form(self, s) -> np.ndarray:
        c, eps, a = self.power_form()
        z = eps + 1j * np.asarray(s, dtype=float)
        return c * z ** a

    def closed_form_derivative(self, s) -> np.ndarray:
        c, eps, a = self.power_form()
        z = eps + 1j * np.asarray(s, dtype=float)
        return 1j * c * a * z ** (a - 1)

    # evaluation ---------------------------------------------------------

    def point(self, s):
        """Evaluate the path at ``s`` (scalar or array)."""
        return self.evaluate(s)[0]

    def derivative(self, s):
        return self.evaluate(s)[1]

    def evaluate(self, s):
        """Return ``(x(s), dx/ds)``; pullbacks use continuity-tracked roots."""
        scalar = np.ndim(s) == 0
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        if self.kind == "pullback":
            x, dx = _pullback_eval(self, s_arr)
        elif self.kind == "rotated":
            px, pdx = self.parent.evaluate(s_arr)
            r = unit_root(self.rotation)
            x, dx = r * px, r * pdx
        else:
            x, dx = self.closed_form(s_arr), self.closed_form_derivative(s_arr)
        if scalar:
            return complex(x[0]), complex(dx[0])
        return x, dx

    # serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "epsilon": self.epsilon,
            "winding_n": self.winding_n,
            "rotation_num": self.rotation.numerator,
            "rotation_den": self.rotation.denominator,
            "map_m": self.map_m,
            "span": self.span,
            "parent": None if self.parent is None else self.parent.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ContourSpec":
        parent = d.get("parent")
        return cls(
            kind=d["kind"],
            epsilon=float(d.get("epsilon", 0.5)),
            winding_n=int(d.get("winding_n", 0)),
            rotation=Fraction(int(d.get("rotation_num", 0)), int(d.get("rotation_den", 1))),
            parent=None if parent is None else cls.from_dict(parent),
            map_m=int(d.get("map_m", 1)),
            span=float(d.get("span", 20.0)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ContourSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class StokesWedge:
    center_angle: float
    half_width: float
    decay_flag: bool

    def contains(self, theta: float) -> bool:
        d = (theta - self.center_angle + np.pi) % (2 * np.pi) - np.pi
        return abs(d) < self.half_width


# dense sampling -----------------------------------------------------------

def _wrap(d):
    return (d + np.pi) % (2 * np.pi) - np.pi


def dense_samples(func, s_lo: float, s_hi: float, max_dphase: float = np.pi / 4,
                  extra=(), scale: float = 1.0, max_rounds: int = 40):
    """Sample ``func`` on ``[s_lo, s_hi]`` until adjacent arguments differ
    by less than ``max_dphase``.  Returns ``(s, values)``."""
    u_hi = np.arcsinh(max(abs(s_lo), abs(s_hi)) / scale)
    u = np.linspace(-u_hi, u_hi, 801)
    base = scale * np.sinh(u)
    s = np.concatenate([base, np.linspace(s_lo, s_hi, 201), np.asarray(extra, float), [0.0]])
    s = np.unique(s[(s >= s_lo) & (s <= s_hi)])
    vals = func(s)
    for _ in range(max_rounds):
        d = np.abs(_wrap(np.diff(np.angle(vals))))
        bad = np.nonzero(d >= max_dphase)[0]
        if bad.size == 0:
            return s, vals
        mids = 0.5 * (s[bad] + s[bad + 1])
        s = np.unique(np.concatenate([s, mids]))
        vals = func(s)
    raise ContourError("phase refinement did not converge")


def _pullback_eval(spec: ContourSpec, s_req: np.ndarray):
    m = spec.map_m
    lo = min(float(s_req.min()), 0.0)
    hi = max(float(s_req.max()), 0.0)
    parent = spec.parent

    def w_of(s):
        return 1j * parent.evaluate(s)[0]

    s, w = dense_samples(w_of, lo, hi, extra=s_req, scale=max(spec.epsilon, 1e-3))
    if np.min(np.abs(w)) < ORIGIN_GUARD:
        raise ContourError("branch tracking reached the origin")
    i0 = int(np.searchsorted(s, 0.0))
    phase = np.unwrap(np.angle(w))
    phase = phase - phase[i0] + np.angle(w[i0])
    root = np.abs(w) ** (1.0 / m) * np.exp(1j * phase / m)
    # anchor: choose the m-th root of unity putting y(0) deepest below the axis
    cands = [np.exp(2j * np.pi * k / m) for k in range(m)]
    k_best = max(range(m), key=lambda k: (root[i0] * cands[k]).real)
    root = root * cands[k_best]
    if (root[i0]).real <= 0:
        raise ContourError("pullback anchor is not in the lower half-plane")
    y = -1j * root
    idx = np.searchsorted(s, s_req)
    y_req = y[idx]
    w_req = w[idx]
    dw = 1j * parent.evaluate(s_req)[1]
    dy = y_req * dw / (m * w_req)
    return y_req, dy


# operations ---------------------------------------------------------------

def winding_path(n: int, epsilon: float, s):
    """Point and ``s``-derivative of the winding-numbered path."""
    if epsilon <= 0:
        raise ContourError("epsilon must be positive")
    z = epsilon + 1j * np.asarray(s, dtype=complex)
    a = 2 * n + 1
    x = -1j * z ** a
    dx = a * z ** (a - 1)
    if np.ndim(s) == 0:
        return complex(x), complex(dx)
    return x, dx


def total_turning(contour: ContourSpec, s_max: float) -> float:
    """Unwrapped change of ``arg x(s)`` over ``[-s_max, s_max]``."""
    s, x = dense_samples(contour.point, -s_max, s_max, max_dphase=np.pi / 8,
                         scale=max(contour.epsilon, 1e-3))
    if np.min(np.abs(x)) < ORIGIN_GUARD:
        raise ContourError("contour passes within 1e-12 of the origin")
    ph = np.unwrap(np.angle(x))
    return float(ph[-1] - ph[0])


def wkb_power(degree: float) -> float:
    """Growth power ``p`` of ``exp(x**p/p)`` for a potential of degree K."""
    return (degree + 2) / 2


def stokes_wedges(p: float, phase: float = 0.0, include_growth: bool = False):
    """Angular sectors where ``exp(-x**p/p * exp(i*phase))`` decays.

    Decay wedges are ``{theta : cos(p*theta + phase) > 0}``, each of full
    width ``pi/p``.  Centers are reported in ``(-pi, pi]``.
    """
    if p <= 1:
        raise ValueError("growth power must exceed 1")
    half = np.pi / (2 * p)
    out = []
    for decay, offset in ((True, 0.0), (False, np.pi)):
        if not decay and not include_growth:
            continue
        k_lo = math.floor((-np.pi * p + phase - offset) / (2 * np.pi)) - 1
        k_hi = math.ceil((np.pi * p + phase - offset) / (2 * np.pi)) + 1
        for k in range(k_lo, k_hi + 1):
            c = (2 * np.pi * k + offset - phase) / p
            if -np.pi + 1e-12 < c <= np.pi + 1e-12:
                out.append(StokesWedge(float(c), half, decay))
    out.sort(key=lambda w: w.center_angle)
    return out


def _mirror(theta: float) -> float:
    t = np.pi - theta
    t = (t + np.pi) % (2 * np.pi) - np.pi
    if t <= -np.pi + 1e-12:
        t = np.pi
    return float(t)


def symmetric_pairs(wedges, tol: float = 1e-9):
    """Pair wedges under the left-right reflection ``theta -> pi - theta``.

    Self-symmetric wedges (centered on the imaginary axis) pair with
    themselves.  Each pair is listed once.
    """
    pairs = []
    used = set()
    for i, w in enumerate(wedges):
        if i in used:
            continue
        target = _mirror(w.center_angle)
        for j, v in enumerate(wedges):
            if j in used:
                continue
            if abs(_wrap(v.center_angle - target)) < tol and v.decay_flag == w.decay_flag:
                pairs.append((w, v))
                used.update((i, j))
                break
    return pairs


def pullback_path(x_contour: ContourSpec, m: int) -> ContourSpec:
    """Preimage of ``x_contour`` under ``i*x = (i*y)**m``."""
    if m < 1:
        raise ContourError("map exponent must be a positive integer")
    if m == 1:
        return x_contour
    return ContourSpec("pullback", parent=x_contour, map_m=m, span=x_contour.span)


def rotate_path(y_contour: ContourSpec, K: int, n: int) -> ContourSpec:
    """Multiply the path by ``exp(2*pi*i*n/K)``; rotations compose additively."""
    if K < 1:
        raise ValueError("K must be a positive integer")
    turn = Fraction(n, K)
    if y_contour.kind == "rotated":
        return ContourSpec("rotated", parent=y_contour.parent,
                           rotation=y_contour.rotation + turn, span=y_contour.span)
    return ContourSpec("rotated", parent=y_contour, rotation=turn, span=y_contour.span)


def sample_csv(contour: ContourSpec, s) -> str:
    """CSV text with columns ``s, re_x, im_x``."""
    x = contour.point(np.asarray(s, dtype=float))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "re_x", "im_x"])
    for si, xi in zip(np.atleast_1d(s), np.atleast_1d(x)):
        w.writerow([f"{si:.12g}", f"{xi.real:.12g}", f"{xi.imag:.12g}"])
    return buf.getvalue()
