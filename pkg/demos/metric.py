"""A metric for a non-Hermitian pencil H r = lambda W r.

The pencil is a similarity transform of a Hermitian-definite one, so its
spectrum is real and a positive metric exists.  The metric built from left
eigenvectors reproduces the Dyson map's Gram matrix up to a constant.
"""

import numpy as np

from toboggan.qmetric import assemble_theta, random_dyson_pencil, solve_biorthogonal

pencil, omega = random_dyson_pencil(6, seed=4, return_omega=True)
bundle = assemble_theta(solve_biorthogonal(pencil))
print("eigenvalues:", np.round(bundle.eigenvalues.real, 6))
for k, v in bundle.report().items():
    if k != "eigenvalues":
        print(f"  {k}: {v}")
gram = omega.conj().T @ omega
c = np.vdot(gram, bundle.theta) / np.vdot(gram, gram)
print("distance from c * Omega^dagger Omega:", np.linalg.norm(bundle.theta - c * gram))
