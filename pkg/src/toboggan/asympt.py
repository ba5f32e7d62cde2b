"""Large-L asymptotics of the rectified imaginary cubic toboggan.

After rectification with ``m = 2N + 1`` the cubic problem reads

    -phi'' + [i (-1)**N m**2 y**(10N+3) + L(L+1)/y**2] phi = E m**2 y**(4N) phi,

with ``L + 1/2 = m (l + 1/2)``.  For large ``L`` the potential part has a
stationary point at ``T_1 = -i tau`` where

    2 L(L+1) = i (-1)**N m**2 (10N+3) T**(10N+5),

and the two-term closed form

    E_n = -(10N+5)/2 tau**(6N+3) + (2n+1)/m sqrt((10N+3)(10N+5)/2) tau**(N+1/2)

follows from a harmonic expansion there.  The module also provides the
self-consistent well (the double zero of ``U - E W`` on the imaginary axis),
which locates the eigenfunctions for the numerical comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .complexpath import ContourSpec
from .eigensolve import ShootingConfig, SolverError, refine_root
from .odeint import IntegratorConfig
from .xform import SturmProblem, imaginary_cubic, rectify


@dataclass(frozen=True)
class CubicAsymptoticCase:
    N: int
    L: float
    tau: float
    sigma: float
    omega: float
    roots: tuple

    @property
    def m(self) -> int:
        return 2 * self.N + 1

    @property
    def ell(self) -> float:
        return (self.L + 0.5) / self.m - 0.5

    @property
    def degree(self) -> int:
        return 10 * self.N + 5


def _strength(N: int) -> float:
    m = 2 * N + 1
    return m * m * (10 * N + 3)


def build_case(N: int, L: float) -> CubicAsymptoticCase:
    """All ``10N+5`` roots ``T_j = -i tau exp(2 pi i (j-1)/(10N+5))``."""
    if L <= 0:
        raise ValueError("L must be positive")
    if N < 0:
        raise ValueError("N must be non-negative")
    k = 10 * N + 5
    tau = (2.0 * L * (L + 1.0) / _strength(N)) ** (1.0 / k)
    roots = tuple(-1j * tau * np.exp(2j * np.pi * j / k) for j in range(k))
    omega = (2 * N + 1) * math.sqrt((10 * N + 3) * (10 * N + 5) / 2.0)
    return CubicAsymptoticCase(N, float(L), tau, tau ** (-(10 * N + 1) / 4.0), omega, roots)


def case_from_ell(N: int, ell: float) -> CubicAsymptoticCase:
    return build_case(N, (2 * N + 1) * (ell + 0.5) - 0.5)


def case_from_tau(N: int, tau: float) -> CubicAsymptoticCase:
    c = _strength(N) * tau ** (10 * N + 5) / 2.0
    return build_case(N, 0.5 * (math.sqrt(1.0 + 4.0 * c) - 1.0))


def energy_estimate(case: CubicAsymptoticCase, n: int) -> float:
    """Two-term closed form for level ``n``."""
    N, t = case.N, case.tau
    lead = -(10 * N + 5) / 2.0 * t ** (6 * N + 3)
    osc = (2 * n + 1) / (2 * N + 1) * math.sqrt((10 * N + 3) * (10 * N + 5) / 2.0) * t ** (N + 0.5)
    return lead + osc


def untwisted_estimate(tau: float, n: int) -> float:
    """The untwisted (``N = 0``) form ``-5/2 tau**3 + sqrt(15 tau / 2)(2n+1)``."""
    return -2.5 * tau ** 3 + math.sqrt(15.0 * tau / 2.0) * (2 * n + 1)


def sturm_problem(case: CubicAsymptoticCase) -> SturmProblem:
    """Rectified cubic problem with the (float) ``L`` of the case."""
    base = rectify(imaginary_cubic(0), case.m)
    from .xform import PotentialSpec, Q
    from fractions import Fraction
    big = Fraction(case.L).limit_denominator(10 ** 12) if case.L < 1e6 else Fraction(case.L)
    pot = PotentialSpec(base.potential.terms, angular_ell=Q(big))
    return SturmProblem(pot, base.weight_coeff, base.weight_power, pot.angular_ell, case.m)


def _U(case, y, d=0):
    """``d``-th derivative of the potential part at ``y``."""
    N, m = case.N, case.m
    p = 10 * N + 3
    a = 1j * (-1) ** N * m * m
    c = case.L * (case.L + 1.0)
    out = 0j
    # a y**p
    coef = 1.0
    for k in range(d):
        coef *= p - k
    out += a * coef * y ** (p - d)
    coef = 1.0
    for k in range(d):
        coef *= -2 - k
    out += c * coef * y ** (-2 - d)
    return out


def _W(case, y, d=0):
    m, q = case.m, 4 * case.N
    coef = 1.0
    for k in range(d):
        coef *= q - k
    return m * m * coef * y ** (q - d) if q >= d else 0j


def effective_minimum(N: int, L: float):
    """Stationary point ``T_1 = -i tau`` and Taylor coefficients of the potential part.

    Returns
    -------
    Q1 : complex
    taylor : dict
        ``{"value", "slope", "quadratic", "cubic"}`` so that
        ``U(Q1 + xi) = value + slope xi + quadratic xi**2 + cubic xi**3 + ...``.
    """
    case = build_case(N, L)
    q = case.roots[0]
    taylor = {
        "value": _U(case, q),
        "slope": _U(case, q, 1),
        "quadratic": _U(case, q, 2) / 2.0,
        "cubic": _U(case, q, 3) / 6.0,
    }
    return q, taylor


def stationarity_residual(N: int, L: float) -> float:
    case = build_case(N, L)
    q = case.roots[0]
    a = 1j * (-1) ** N * case.m ** 2 * (10 * N + 3) * q ** (10 * N + 2)
    b = 2 * case.L * (case.L + 1.0) / q ** 3
    return abs(a - b) / abs(b)


def self_consistent_well(case: CubicAsymptoticCase):
    """Double zero of ``P = U - E W`` on the negative imaginary axis.

    Along ``y = -i t`` the ratio ``U/W = -t**(6N+3) - L(L+1)/(m**2 t**(4N+2))``
    is real and stationary at ``t**(10N+5) = (2/3) L(L+1)/m**2``, where it
    equals ``-(5/2) t**(6N+3)``.

    Returns ``(y_star, E_star, P2)`` with ``P2 = P''(y_star)``.
    """
    N, m = case.N, case.m
    t = (2.0 / 3.0 * case.L * (case.L + 1.0) / (m * m)) ** (1.0 / (10 * N + 5))
    y = -1j * t
    E = -2.5 * t ** (6 * N + 3)
    P2 = _U(case, y, 2) - E * _W(case, y, 2)
    return y, float(E), complex(P2)


def semiclassical_estimate(case: CubicAsymptoticCase, n: int) -> float:
    """Harmonic expansion about the self-consistent well."""
    y, E, P2 = self_consistent_well(case)
    return float((E + (2 * n + 1) * np.sqrt(P2 / 2.0) / _W(case, y)).real)


def well_contour(case: CubicAsymptoticCase) -> tuple[ContourSpec, float]:
    """Shifted line through the self-consistent well and its harmonic width."""
    y, E, P2 = self_consistent_well(case)
    eps = -y.imag
    k = abs(np.sqrt(P2 / 2.0))
    return ContourSpec.shifted_line(eps, span=1e6), 1.0 / math.sqrt(k)


def shooting_levels(case: CubicAsymptoticCase, ns: Sequence[int] = (0, 1),
                    action: float = 40.0, cfg: IntegratorConfig | None = None) -> list[complex]:
    """Shooting eigenvalues of the rectified cubic problem, seeded semiclassically."""
    prob = sturm_problem(case)
    line, width = well_contour(case)
    y, _, P2 = self_consistent_well(case)
    spacing = abs(2 * np.sqrt(P2 / 2.0) / _W(case, y))
    out = []
    for n in ns:
        s_far = width * math.sqrt(2 * action + 2 * n + 1)
        # matching slightly off the peak keeps the normalized mismatch meaningful
        shoot = ShootingConfig(s_match=0.37 * width, s_far=s_far, refine_tol=1e-14,
                               integrator=cfg or IntegratorConfig(rel_tol=1e-12, abs_tol=1e-300,
                                                                   max_step=s_far / 20,
                                                                   min_step=1e-300))
        E0 = semiclassical_estimate(case, n)
        E, res = refine_root(prob, line, E0, shoot, E0 + 0.01 * spacing)
        if res > 1e-4:
            raise SolverError(f"level {n} did not converge (|D| = {res:.2e})", stage="asympt")
        out.append(E)
    return out


def rescale_F(E: float, ell: float) -> tuple[float, float]:
    """``rho = 1/(l + 1/2)**2`` and ``F = rho**(3/5) E``."""
    if ell <= -0.5:
        raise ValueError("need l > -1/2")
    rho = 1.0 / (ell + 0.5) ** 2
    return rho, rho ** 0.6 * E


def log_slope(N: int, n: int, rho: float, rel_step: float = 0.1) -> float:
    """``d log|F| / d log rho`` of the closed form at ``rho``."""
    def logF(r):
        ell = 1.0 / math.sqrt(r) - 0.5
        E = energy_estimate(case_from_ell(N, ell), n)
        return math.log(abs(rescale_F(E, ell)[1]))
    a, b = rho * (1 - rel_step), rho * (1 + rel_step)
    return (logF(b) - logF(a)) / (math.log(b) - math.log(a))
