"""Partner spectra for W(r) = r - (gamma + 1/2)/r on the line r = s - 0.5i.

On a line that avoids the singularity the factorization holds exactly, so
the two partner spectra coincide apart from the zero mode of the upper one.
"""

from fractions import Fraction

from toboggan.susy import build_partners, classify, default_window, partner_spectrum, Superpotential

for g in (Fraction(-5, 2), Fraction(-3, 2), Fraction(-1, 2), Fraction(1, 2), Fraction(3, 2)):
    pair = build_partners(Superpotential((0, 1), g))
    win = default_window(float(g), 14.0)
    U = partner_spectrum(pair.upper, win)
    L = partner_spectrum(pair.lower, win)
    tag, _ = classify(U, L, win[1] - 4.0)
    print(f"gamma={str(g):5s}  upper {[round(float(e.real), 6) for e in U[:4]]}  "
          f"lower {[round(float(e.real), 6) for e in L[:4]]}  -> {tag}")
