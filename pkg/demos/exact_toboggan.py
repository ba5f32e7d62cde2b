"""A solvable toboggan: the free particle with a centrifugal term.

Solutions are Hankel functions of order nu = l + 1/2.  Going m half-turns
around the origin mixes in the growing Hankel function with a coefficient
that vanishes exactly when m*nu is an integer and nu is not.  Only then does
the decaying solution stay decaying on the far arm of the contour.
"""

from toboggan.exactsolv import build_case, continuation_check, monodromy_coefficients, monodromy_limit

print(" N  M   nu     |c_unphysical|   decay ratio")
for N in (1, 2):
    for M in range(1, 5):
        case = build_case(3, 0, N, M)
        if case.bound:
            cu = abs(monodromy_coefficients(case.nu, case.m)[1])
            ratio = f"{continuation_check(case):.2e}"
        else:
            cu = abs(monodromy_limit(int(case.nu), case.m)[1])
            ratio = f"{continuation_check(case, force=True):.2e} (no bound state)"
        print(f" {N}  {M}  {str(case.nu):5s}  {cu:12.3g}     {ratio}")
