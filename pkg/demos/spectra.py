"""Shooting versus the finite-difference oracle.

The harmonic oscillator on a shifted line recovers 1, 3, 5, ...; the
imaginary cubic oscillator has a real spectrum although its potential is
complex.  The matrix oracle is a coarse independent check.
"""

from toboggan.complexpath import ContourSpec
from toboggan.eigensolve import ShootingConfig, harmonic_problem, matrix_spectrum, shoot_spectrum
from toboggan.gaussian import GaussRational as G
from toboggan.xform import PotentialSpec, plain

line = ContourSpec.shifted_line(0.5)

res = shoot_spectrum(harmonic_problem(), line, ShootingConfig(scan=(0, 12, 61)))
print("harmonic levels:", [f"{E.real:.10f}" for E in res.values])

cubic = plain(PotentialSpec.from_terms([(G(0, 1), 3)]))
shoot = shoot_spectrum(cubic, line, ShootingConfig(scan=(0, 8, 41)))
grid = matrix_spectrum(cubic, line, 400, [1.0, 4.0, 7.5], s_max=8.0, per_target=1)
print("\nimaginary cubic, shooting vs matrix (with its Richardson error estimate):")
for a, b in zip(shoot.eigenvalues, grid.eigenvalues):
    print(f"  {a.E.real:.10f} {a.E.imag:+.1e}i   {b.E.real:.8f}  (+/- {b.error_estimate:.1e})")
