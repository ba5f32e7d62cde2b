"""Rectification of multisheeted problems into Sturm-Schroedinger form.

The change of variables ``x = f(y) = i**(m-1) * y**m`` (equivalently
``i*x = (i*y)**m``) together with ``psi(x) = sqrt(f'(y)) * phi(y)`` turns

    -psi'' + [V(x) + l(l+1)/x**2] psi = E psi

into the planar generalized eigenproblem

    -phi'' + [U(y) + L(L+1)/y**2] phi = E * W(y) * phi

with ``W(y) = f'(y)**2 = m**2 (-1)**(m-1) y**(2m-2)``.  Each monomial
``c x**p`` becomes ``c m**2 i**((m-1)(p+2)) y**(m(p+2)-2)``, and the
Schwarzian of the map shifts the centrifugal strength to
``L(L+1) = m**2 l(l+1) + (m**2-1)/4``, i.e. ``L + 1/2 = m (l + 1/2)``.

All coefficient algebra is exact over the Gaussian rationals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .gaussian import GaussRational

Q = GaussRational
HALF = Fraction(1, 2)


def _exact(v) -> GaussRational:
    if isinstance(v, str):
        v = v.strip().replace(" ", "")
        if v.endswith("j") or v.endswith("i"):
            c = complex(v.replace("i", "j"))
            return Q.of(c)
        return Q(Fraction(v))
    return Q.of(v)


@dataclass(frozen=True)
class PotentialSpec:
    """Sum of monomials ``c * x**p`` plus a centrifugal term ``c2 / x**2``.

    Parameters
    ----------
    terms : sequence of (coefficient, power)
        Powers are integers ``>= -1``; like powers are merged and zero
        coefficients dropped, so equality is structural.
    centrifugal : Gaussian rational, optional
        Strength ``l(l+1)`` of the inverse-square term.
    angular_ell : Gaussian rational, optional
        ``l`` itself.  When given, ``centrifugal`` is derived from it.
    """

    terms: tuple = ()
    centrifugal: GaussRational = Q(0)
    angular_ell: Optional[GaussRational] = None

    def __post_init__(self):
        merged: dict[int, GaussRational] = {}
        for c, p in self.terms:
            if int(p) != p:
                raise ValueError(f"fractional power {p!r} is not supported")
            p = int(p)
            if p < -1:
                raise ValueError("inverse-square parts belong in the centrifugal term")
            merged[p] = merged.get(p, Q(0)) + _exact(c)
        terms = tuple(sorted(((c, p) for p, c in merged.items() if c), key=lambda t: -t[1]))
        object.__setattr__(self, "terms", terms)
        if self.angular_ell is not None:
            ell = _exact(self.angular_ell)
            object.__setattr__(self, "angular_ell", ell)
            cf = ell * (ell + 1)
            if self.centrifugal and _exact(self.centrifugal) != cf:
                raise ValueError("centrifugal strength disagrees with l(l+1)")
            object.__setattr__(self, "centrifugal", cf)
        else:
            object.__setattr__(self, "centrifugal", _exact(self.centrifugal))

    @classmethod
    def from_terms(cls, terms, ell=None, centrifugal=0) -> "PotentialSpec":
        return cls(tuple((c, p) for c, p in terms), centrifugal=centrifugal,
                   angular_ell=None if ell is None else _exact(ell))

    def coefficient(self, power: int) -> GaussRational:
        for c, p in self.terms:
            if p == power:
                return c
        return Q(0)

    def numeric(self):
        """Complex coefficient and integer power arrays, centrifugal included."""
        cs = [complex(c) for c, _ in self.terms]
        ps = [p for _, p in self.terms]
        if self.centrifugal:
            cs.append(complex(self.centrifugal))
            ps.append(-2)
        return np.array(cs, dtype=complex), np.array(ps, dtype=np.int64)

    def __call__(self, x):
        cs, ps = self.numeric()
        x = np.asarray(x, dtype=complex)
        out = np.zeros_like(x)
        for c, p in zip(cs, ps):
            out = out + c * x ** int(p)
        return out


@dataclass(frozen=True)
class SturmProblem:
    """``-phi'' + V(y) phi = E * weight_coeff * y**weight_power * phi``."""

    potential: PotentialSpec
    weight_coeff: GaussRational = Q(1)
    weight_power: int = 0
    big_ell: Optional[GaussRational] = None
    map_exponent: int = 1

    def __post_init__(self):
        object.__setattr__(self, "weight_coeff", _exact(self.weight_coeff))
        if self.big_ell is not None:
            object.__setattr__(self, "big_ell", _exact(self.big_ell))
        if self.weight_power < 0 or self.weight_power % 2:
            raise ValueError("weight power must be a non-negative even integer")

    def numeric(self):
        """``(coeffs, powers, weight_coeff, weight_power)`` for the integrators."""
        cs, ps = self.potential.numeric()
        return cs, ps, complex(self.weight_coeff), int(self.weight_power)

    def Q(self, y, E):
        """Coefficient function of ``-phi'' + Q phi = 0``."""
        y = np.asarray(y, dtype=complex)
        return self.potential(y) - E * complex(self.weight_coeff) * y ** self.weight_power

    def weight(self, y):
        return complex(self.weight_coeff) * np.asarray(y, dtype=complex) ** self.weight_power

    def identity_key(self) -> str:
        return self.to_json()

    # text / json --------------------------------------------------------

    def equation_text(self, var: str = "y") -> str:
        """Canonical one-line rendering of the equation."""
        parts = [_monomial(c, p, var) for c, p in self.potential.terms]
        if self.potential.centrifugal:
            parts.append(f"{_coef(self.potential.centrifugal)}/{var}^2")
        pot = " + ".join(parts) if parts else "0"
        w = _monomial(self.weight_coeff, self.weight_power, var)
        return f"-phi'' + [{pot}] phi = E * [{w}] phi"

    def to_dict(self) -> dict:
        def enc(x: Fraction):
            return x.numerator if x.denominator == 1 else str(x)
        terms = [[enc(c.re), enc(c.im), p] for c, p in self.potential.terms]
        d = {
            "terms": terms,
            "centrifugal": [enc(self.potential.centrifugal.re), enc(self.potential.centrifugal.im)],
            "big_ell": None if self.big_ell is None else [enc(self.big_ell.re), enc(self.big_ell.im)],
            "weight": [enc(self.weight_coeff.re), enc(self.weight_coeff.im), self.weight_power],
            "map_exponent": self.map_exponent,
        }
        if self.potential.angular_ell is not None:
            e = self.potential.angular_ell
            d["ell"] = [enc(e.re), enc(e.im)]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "SturmProblem":
        def gq(pair):
            return Q(Fraction(pair[0]), Fraction(pair[1]))
        terms = [(gq(t[:2]), int(t[2])) for t in d["terms"]]
        ell = d.get("ell")
        pot = PotentialSpec(tuple(terms),
                            centrifugal=gq(d.get("centrifugal", [0, 0])) if ell is None else Q(0),
                            angular_ell=None if ell is None else gq(ell))
        w = d.get("weight", [1, 0, 0])
        big = d.get("big_ell")
        return cls(pot, gq(w[:2]), int(w[2]), None if big is None else gq(big),
                   int(d.get("map_exponent", 1)))

    @classmethod
    def from_json(cls, text: str) -> "SturmProblem":
        return cls.from_dict(json.loads(text))


def _coef(c: GaussRational) -> str:
    s = str(c)
    if c.is_real and c.re.denominator != 1:
        return f"({s})"
    return s


def _monomial(c: GaussRational, p: int, var: str) -> str:
    cs = _coef(c)
    if p == 0:
        return cs
    v = var if p == 1 else f"{var}^{p}"
    if c == 1:
        return v
    if c == -1:
        return f"-{v}"
    return f"{cs}*{v}"


def plain(potential: PotentialSpec) -> SturmProblem:
    """Wrap an ordinary problem as a Sturm problem with unit weight."""
    big = potential.angular_ell
    return SturmProblem(potential, Q(1), 0, big, 1)


def rectify(problem: PotentialSpec, m: int) -> SturmProblem:
    """Apply ``i*x = (i*y)**m`` to ``problem`` and return the planar pencil.

    Parameters
    ----------
    problem : PotentialSpec
        Potential in the original coordinate ``x``.
    m : int
        Map exponent, ``m >= 1``.

    Returns
    -------
    SturmProblem
        Exact transformed potential, weight ``m**2 (-1)**(m-1) y**(2m-2)``
        and ``L = m (l + 1/2) - 1/2`` when ``l`` is known.
    """
    if int(m) != m or m < 1:
        raise ValueError("map exponent must be a positive integer")
    m = int(m)
    if m == 1:
        return plain(problem)
    m2 = Q(m * m)
    new_terms = []
    for c, p in problem.terms:
        q = m * (p + 2) - 2
        if q < -1:
            raise ValueError(f"power {p} maps to {q}, outside the supported range")
        new_terms.append((c * m2 * Q.i_power((m - 1) * (p + 2)), q))
    cf = m2 * problem.centrifugal + Q(Fraction(m * m - 1, 4))
    if problem.angular_ell is not None:
        big = Q(m) * (problem.angular_ell + Q(HALF)) - Q(HALF)
        pot = PotentialSpec(tuple(new_terms), angular_ell=big)
        assert pot.centrifugal == cf
    else:
        big = None
        pot = PotentialSpec(tuple(new_terms), centrifugal=cf)
    wc = m2 * (Q(-1) ** (m - 1))
    return SturmProblem(pot, wc, 2 * m - 2, big, m)


def prefactor(m: int, y):
    """``sqrt(f'(y))`` for ``f(y) = i**(m-1) y**m``.

    For an array the argument of ``y`` is unwrapped along the samples, so
    the branch is continuous along a sampled path; a scalar uses the
    principal argument.
    """
    if m == 1:
        return np.ones_like(np.asarray(y, dtype=complex)) if np.ndim(y) else 1.0 + 0j
    ya = np.atleast_1d(np.asarray(y, dtype=complex))
    if np.any(ya == 0):
        raise ValueError("prefactor is singular at y = 0")
    arg = np.unwrap(np.angle(ya)) if ya.size > 1 else np.angle(ya)
    half = (m - 1) / 2.0
    out = (np.sqrt(m) * np.exp(1j * np.pi / 2 * half)
           * np.abs(ya) ** half * np.exp(1j * half * arg))
    if np.ndim(y) == 0:
        return complex(out[0])
    return out


def harmonic(ell) -> PotentialSpec:
    """``x**2`` with centrifugal index ``l``."""
    return PotentialSpec.from_terms([(1, 2)], ell=ell)


def imaginary_cubic(ell) -> PotentialSpec:
    """``i x**3`` with centrifugal index ``l``."""
    return PotentialSpec.from_terms([(Q(0, 1), 3)], ell=ell)
