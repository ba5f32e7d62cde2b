"""Straightening a tobogganic contour.

A contour that winds N extra half-turns around the branch point at the
origin becomes an ordinary shifted line after the change of variables with
m = 2N + 1.  The price is a Sturm-type equation with a weight multiplying E.
"""

from fractions import Fraction

from toboggan.complexpath import ContourSpec, pullback_path, stokes_wedges, total_turning, wkb_power
from toboggan.xform import harmonic, imaginary_cubic, rectify

print("Winding contours and their total turning angle (in units of pi):")
for N in range(4):
    c = ContourSpec.winding(N, 0.5, span=1e3)
    print(f"  N={N}: {total_turning(c, 1e3) / 3.141592653589793:.4f}")

N = 2
y = pullback_path(ContourSpec.winding(N, 0.5), 2 * N + 1)
print(f"\nPulled back with m={2 * N + 1}, the N={N} spiral is the line s - 0.5i:", y.point(3.0))

print("\nThe harmonic oscillator with a centrifugal term on the U-shaped contour (m=2):")
print("  ", rectify(harmonic(Fraction(1, 3)), 2).equation_text())

print("\nThe imaginary cubic oscillator for the first three winding numbers:")
for N in range(3):
    print(f"  N={N}:", rectify(imaginary_cubic(Fraction(1, 2)), 2 * N + 1).equation_text())

print("\nAsymptotic wedges of a degree-10 potential (decaying ones):")
for w in stokes_wedges(wkb_power(10)):
    if w.decay_flag:
        print(f"  centre {w.center_angle:+.4f}, width {2 * w.half_width:.4f}")
