"""The exactly solvable free toboggan.

The radial equation ``-psi'' + l(l+1)/r**2 psi = kappa**2 psi`` continued
along a path winding ``N`` extra half-turns around the origin has the Hankel
solutions ``sqrt(r) H_nu(kappa r)`` with ``nu = l + 1/2``.  Going around the
origin by ``m = 2N`` half-turns mixes them,

    H2(z e^{i m pi}) = [sin((1+m) pi nu) / sin(pi nu)] H2(z)
                       + e^{i pi nu} [sin(m pi nu) / sin(pi nu)] H1(z),

so a solution decaying on the first arm also decays on the last one exactly
when the second coefficient vanishes.  With ``l = (M - N) / (2N)`` this
happens for every ``M`` that is not a multiple of ``2N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .complexpath import ContourSpec, rotate_path
from .odeint import IntegrationError, IntegratorConfig, OdeState, integrate_along, laurent


@dataclass(frozen=True)
class SolvableCase:
    D: int
    n: int
    N: int
    M: int
    gamma: Fraction
    ell: Fraction
    nu: Fraction
    m: int
    bound: bool


def build_case(D: int, n: int, N: int, M: int) -> SolvableCase:
    """Exact derived quantities of the solvable toboggan."""
    if N < 1 or M < 1 or D < 1:
        raise ValueError("need N >= 1, M >= 1, D >= 1")
    nu = Fraction(M, 2 * N)
    ell = Fraction(M - N, 2 * N)
    gamma = nu * nu - (n + Fraction(D - 2, 2)) ** 2
    return SolvableCase(D, n, N, M, gamma, ell, nu, 2 * N, M % (2 * N) != 0)


def _sin_pi(x: Fraction) -> float:
    """``sin(pi x)``, exact zero at integers."""
    x = Fraction(x)
    if x.denominator == 1:
        return 0.0
    r = x % 2
    exact = {Fraction(1, 2): 1.0, Fraction(3, 2): -1.0}
    if r in exact:
        return exact[r]
    return math.sin(math.pi * float(r))


def _expi_pi(x: Fraction) -> complex:
    """``exp(i pi x)`` exact at multiples of 1/2."""
    r = Fraction(x) % 2
    exact = {Fraction(0): 1 + 0j, Fraction(1, 2): 1j, Fraction(1): -1 + 0j, Fraction(3, 2): -1j}
    if r in exact:
        return exact[r]
    return complex(math.cos(math.pi * float(r)), math.sin(math.pi * float(r)))


def monodromy_coefficients(nu, m: int) -> tuple[complex, complex]:
    """``(c_physical, c_unphysical)`` of the continued second Hankel function.

    Whenever ``m * nu`` is an integer the unphysical coefficient is returned
    as an exact ``0`` and the physical one as the exact sign
    ``(-1)**(m nu)``; other rational ``nu`` fall back to floating point.
    """
    nu = Fraction(nu)
    if m < 0 or m % 2:
        raise ValueError("m must be a non-negative even integer")
    if m == 0:
        return 1 + 0j, 0j
    if nu.denominator == 1:
        raise ValueError("integer order: use monodromy_limit")
    mnu = m * nu
    if mnu.denominator == 1:
        return complex((-1) ** (int(mnu) % 2)), 0j
    s = _sin_pi(nu)
    cp = _sin_pi((1 + m) * nu) / s
    cu = _expi_pi(nu) * _sin_pi(mnu) / s
    return complex(cp), complex(cu)


def monodromy_limit(nu: int, m: int) -> tuple[complex, complex]:
    """Integer-order limit of :func:`monodromy_coefficients`.

    ``sin(k pi nu)/sin(pi nu) -> k (-1)**((k+1) nu)`` gives
    ``c_physical = 1 + m`` and ``c_unphysical = m`` for even ``m``.
    """
    if int(nu) != nu:
        raise ValueError("order must be an integer")
    if m < 0 or m % 2:
        raise ValueError("m must be a non-negative even integer")
    if m == 0:
        return 1 + 0j, 0j
    nu = int(nu)

    def ratio(k):
        return k * (-1) ** (((k + 1) * nu) % 2)

    return complex(ratio(1 + m)), complex((-1) ** (nu % 2) * ratio(m))


def monodromy_matrix(nu, m: int) -> np.ndarray:
    """Rows give the continued ``(H1, H2)`` in the basis ``(H1, H2)``."""
    nu = Fraction(nu)
    if nu.denominator == 1:
        raise ValueError("integer order")
    s = _sin_pi(nu)
    h1 = [-_sin_pi((m - 1) * nu) / s, -_expi_pi(-nu) * _sin_pi(m * nu) / s]
    cp, cu = monodromy_coefficients(nu, m)
    return np.array([h1, [cu, cp]], dtype=complex)


def _continuation_path(N: int, epsilon: float) -> ContourSpec:
    # both arms must end in the lower half-plane, where H2 decays; for odd N
    # the plain spiral ends above the axis and is rotated by pi
    base = ContourSpec.winding(N, epsilon, span=1e9)
    return rotate_path(base, 2, 1) if N % 2 else base


def auto_epsilon(N: int, kappa: float, s_far: float, target: float = 12.0) -> float:
    """Shift making ``kappa |Im r(+-s_far)|`` about ``target`` on both arms."""
    if N == 0:
        return target / kappa
    eps = target / (kappa * (2 * N + 1) * s_far ** (2 * N))
    for _ in range(20):
        c = _continuation_path(N, eps)
        im = min(abs(c.point(-s_far).imag), abs(c.point(s_far).imag))
        new = eps * target / (kappa * im)
        if abs(new - eps) < 1e-12 * eps:
            break
        eps = new
    return eps


def _im_far(N, eps, s):
    c = _continuation_path(N, eps)
    return min(abs(c.point(-s).imag), abs(c.point(s).imag))


def continuation_plan(case: SolvableCase, kappa: float = 1.0, s_far: float = 30.0,
                      target: float = 12.0) -> tuple[float, float]:
    """Choose ``(epsilon, s_end)`` for :func:`continuation_check`.

    The shift is set so that ``kappa |Im r|`` reaches ``target`` at
    ``s_far``.  For ``l != 0`` the path must also stay away from the
    origin, where the two local solutions ``r**(1/2 +- nu)`` separate by
    ``(kappa |r|)**(2 nu)``; the shift is floored so that this ratio stays
    above 1e-3, and the endpoint is pulled in to where the target decay is
    reached.
    """
    N = case.N
    eps = auto_epsilon(N, kappa, s_far, target)
    nu = float(case.nu)
    if N == 0:
        return eps, s_far
    floor = ((1e-3) ** (1.0 / (2 * nu)) / kappa) ** (1.0 / (2 * N + 1))
    if floor <= eps:
        return eps, s_far
    lo, hi = 0.0, s_far
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if kappa * _im_far(N, floor, mid) < target:
            lo = mid
        else:
            hi = mid
    return floor, hi


def continuation_check(case: SolvableCase, kappa: float = 1.0, s_far: float = 30.0,
                       epsilon: float | None = None, force: bool = False,
                       cfg: IntegratorConfig = IntegratorConfig()) -> float:
    """Continue the decaying Hankel solution along the winding path.

    The path is the winding-``N`` spiral, rotated by ``pi`` for odd ``N``,
    so that both arms end in the lower half-plane where ``H2`` decays.  The two-term
    asymptotic series seeds the solution at ``-s_far``.

    Returns
    -------
    float
        ``|psi(s_end)| / max |psi|`` over the path; small values confirm
        decay on both arms.  ``s_end = s_far`` unless the plan pulls it in
        (see :func:`continuation_plan`).
    """
    if not case.bound and not force:
        raise ValueError("case has no bound state (pass force=True to check anyway)")
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    N = case.N
    if epsilon is None:
        eps, s_end = continuation_plan(case, kappa, s_far)
    else:
        eps, s_end = epsilon, s_far
    path = _continuation_path(N, eps)
    ends = path.point(np.array([-s_end, s_end]))
    if np.any(ends.imag >= 0):
        # a large shift floor stops the spiral before it has turned far enough
        raise IntegrationError(f"path ends at {ends[0]:.3g} and {ends[1]:.3g}, outside the "
                               f"decay half-plane (shift {eps:.3g}, s_end {s_end:.3g})",
                               stage="continuation plan")
    lam = float(case.nu) ** 2 - 0.25
    Q = laurent([(lam, -2), (-kappa * kappa, 0)] if lam else [(-kappa * kappa, 0)])
    r0 = path.point(-s_end)
    a = lam / (2j * kappa)
    e = np.exp(-1j * kappa * r0)
    phi = e * (1 + a / r0)
    dphi = e * (-1j * kappa * (1 + a / r0) - a / r0 ** 2)
    init = OdeState(-s_end, r0, complex(phi), complex(dphi))
    tr = integrate_along(path, Q, 0.0, -s_end, s_end, init, cfg, stage="continuation")
    log_end = math.log(abs(tr.state.phi)) + tr.state.log_scale
    return math.exp(log_end - tr.log_max_abs)


def free_case(N: int, ell) -> SolvableCase:
    """Case record for arbitrary ``N >= 0`` and ``l`` (bypassing the M label)."""
    ell = Fraction(ell)
    nu = ell + Fraction(1, 2)
    bound = N == 0 or ((2 * N * nu).denominator == 1 and nu.denominator != 1)
    return SolvableCase(3, 0, N, 0, nu * nu - Fraction(1, 4), ell, nu, 2 * N, bound)
