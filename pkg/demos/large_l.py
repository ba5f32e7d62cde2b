"""Large angular momentum for the tobogganic imaginary cubic oscillator.

Energies are compared three ways: the two-term closed form, a harmonic
expansion about the self-consistent well, and shooting on a line through
that well.  The last two agree closely; the closed form's leading term
drifts away for N >= 1.
"""

from toboggan.asympt import (case_from_ell, case_from_tau, energy_estimate, rescale_F,
                             semiclassical_estimate, shooting_levels)

print(" N   tau      closed form          well expansion       shooting")
for N in (0, 1):
    for tau in (3.0, 4.5):
        case = case_from_tau(N, tau)
        E = shooting_levels(case, (0,))[0]
        print(f" {N}  {tau:4.1f}  {energy_estimate(case, 0):18.6f}  "
              f"{semiclassical_estimate(case, 0):18.6f}  {E.real:18.6f}")

print("\nRescaled ground energy F = rho**(3/5) E of the closed form, l = 1000:")
for N in range(5):
    rho, F = rescale_F(energy_estimate(case_from_ell(N, 1000.0), 0), 1000.0)
    print(f"  N={N}: F = {F:.6f}")
