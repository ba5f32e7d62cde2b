"""Metrics for finite non-Hermitian Sturm pencils ``H r = lambda W r``.

Right vectors ``r`` solve ``H r = lambda W r``; left vectors ``l`` solve
``H^dagger l = conj(lambda) W^dagger l`` and are scaled so that
``l^dagger W r = 1``.  From these

    Theta = sum_lambda d_lambda l l^dagger W,

where the positive weights ``d`` (free up to one overall constant) are
chosen so that both intertwining relations ``H^dagger Theta = Theta H`` and
``W^dagger Theta = Theta W`` hold.  For a real spectrum ``Theta W`` is then
Hermitian positive definite.  The resolution of identity reads
``I = sum r l^dagger W`` and the operators are recovered as
``H = sum W r lambda l^dagger W`` and ``W = sum W r l^dagger W``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

MAX_DIM = 64
DEGENERACY_TOL = 1e-8


class MetricError(ValueError):
    """Degenerate spectrum, singular weight or malformed pencil."""


@dataclass(frozen=True)
class Pencil:
    H: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        H = np.asarray(self.H, dtype=complex)
        W = np.asarray(self.W, dtype=complex)
        if H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape != W.shape:
            raise MetricError("H and W must be square matrices of equal size")
        if H.shape[0] > MAX_DIM:
            raise MetricError(f"dimension {H.shape[0]} exceeds {MAX_DIM}")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "W", W)

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    def condition(self) -> float:
        return float(np.linalg.cond(self.W))

    def to_dict(self) -> dict:
        return {"H": matrix_to_json(self.H), "W": matrix_to_json(self.W)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Pencil":
        if set(d) - {"H", "W"} or "H" not in d:
            raise MetricError("pencil needs keys 'H' and optionally 'W'")
        H = matrix_from_json(d["H"])
        W = matrix_from_json(d["W"]) if "W" in d else np.eye(H.shape[0], dtype=complex)
        return cls(H, W)

    @classmethod
    def from_json(cls, text: str) -> "Pencil":
        return cls.from_dict(json.loads(text))


def matrix_to_json(A) -> list:
    A = np.asarray(A, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in A]


def matrix_from_json(rows) -> np.ndarray:
    try:
        return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise MetricError("matrix entries must be [re, im] pairs") from exc


@dataclass
class BiorthogonalSystem:
    """Eigenvalues with right vectors (columns of ``R``) and left vectors (columns of ``L``)."""

    pencil: Pencil
    eigenvalues: np.ndarray
    R: np.ndarray
    L: np.ndarray

    def overlaps(self) -> np.ndarray:
        """Matrix ``l_i^dagger W r_j``; the identity for a biorthonormal system."""
        return self.L.conj().T @ self.pencil.W @ self.R

    def drop(self, k: int) -> "BiorthogonalSystem":
        keep = [i for i in range(len(self.eigenvalues)) if i != k]
        return BiorthogonalSystem(self.pencil, self.eigenvalues[keep], self.R[:, keep], self.L[:, keep])


@dataclass
class MetricBundle:
    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    theta: np.ndarray
    dieudonne_residuals: tuple
    hermiticity: float
    positivity: float
    orthogonality: float

    def report(self) -> dict:
        return {
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "dieudonne_H": self.dieudonne_residuals[0],
            "dieudonne_W": self.dieudonne_residuals[1],
            "hermiticity": self.hermiticity,
            "orthogonality": self.orthogonality,
            "min_eig_theta_W": self.positivity,
            "positive_definite": bool(self.positivity > 0),
        }


def _scale_columns(R: np.ndarray, mode: str) -> np.ndarray:
    if mode == "unit":
        return R / np.linalg.norm(R, axis=0)
    if mode == "peak":
        idx = np.argmax(np.abs(R), axis=0)
        return R / R[idx, np.arange(R.shape[1])]
    raise MetricError(f"unknown right_scale {mode!r}")


def solve_biorthogonal(p: Pencil, right_scale: str = "unit", w_cond_max: float = 1e12) -> BiorthogonalSystem:
    """Right and left eigensystems of the pencil, biorthonormalized.

    Parameters
    ----------
    right_scale : {"unit", "peak"}
        Right vectors get unit 2-norm, or their largest component set to 1.
        The left vectors absorb the normalization ``l^dagger W r = 1``.
    """
    cond = p.condition()
    if not np.isfinite(cond) or cond > w_cond_max:
        raise MetricError(f"W is near-singular (condition number {cond:.3e})")
    K = np.linalg.solve(p.W, p.H)
    lam, R = np.linalg.eig(K)
    scale = 1.0 + np.max(np.abs(lam))
    gaps = np.abs(lam[:, None] - lam[None, :])
    np.fill_diagonal(gaps, np.inf)
    if gaps.size > 1 and gaps.min() < DEGENERACY_TOL * scale:
        raise MetricError(f"degenerate eigenvalues (gap {gaps.min():.3e})")
    order = np.lexsort((lam.imag, lam.real))
    lam, R = lam[order], _scale_columns(R[:, order], right_scale)

    Kl = np.linalg.solve(p.W.conj().T, p.H.conj().T)
    mu, Lraw = np.linalg.eig(Kl)
    # pair each left eigenvalue with the conjugate of a right one
    L = np.empty_like(R)
    used = set()
    for i, z in enumerate(lam):
        j = int(np.argmin(np.abs(mu - np.conj(z))))
        if j in used:
            raise MetricError("left/right eigenvalue pairing failed")
        used.add(j)
        L[:, i] = Lraw[:, j]
    for i in range(len(lam)):
        ov = L[:, i].conj() @ p.W @ R[:, i]
        if abs(ov) < 1e-14:
            raise MetricError("vanishing left/right overlap")
        L[:, i] = L[:, i] / np.conj(ov)
    return BiorthogonalSystem(p, lam, R, L)


def metric_weights(sys: BiorthogonalSystem) -> np.ndarray:
    """Positive weights ``d`` making ``sum d l l^dagger W`` obey both intertwining relations.

    A metric with ``Theta r_lambda`` proportional to ``l_lambda`` has the
    form ``sum d l l^dagger W``.  Both relations then reduce to the
    Hermiticity of ``diag(d) G`` with ``G = L^dagger W W R``, which fixes
    the ratios ``d_a / d_b = conj(G_ba) / G_ab``.  The ratios are combined
    by weighted least squares on ``log d``; pairs with ``G_ab = 0`` carry
    no information and a fully diagonal ``G`` (``W`` proportional to the
    identity) leaves ``d = 1``.
    """
    W = sys.pencil.W
    G = sys.L.conj().T @ W @ W @ sys.R
    n = G.shape[0]
    mag = np.abs(G)
    rows, rhs = [], []
    floor = 1e-12 * mag.max() if n else 0.0
    for a in range(n):
        for b in range(a + 1, n):
            wgt = math.sqrt(mag[a, b] * mag[b, a])
            if wgt <= floor:
                continue
            row = np.zeros(n)
            row[a], row[b] = 1.0, -1.0
            rows.append(row * wgt)
            rhs.append(wgt * (math.log(mag[b, a]) - math.log(mag[a, b])))
    if not rows:
        return np.ones(n)
    A = np.vstack(rows + [np.ones(n)])
    y = np.array(rhs + [0.0])
    logd = np.linalg.lstsq(A, y, rcond=None)[0]
    return np.exp(logd)


def assemble_theta(sys: BiorthogonalSystem, balance: bool = True) -> MetricBundle:
    """``Theta = sum d l l^dagger W`` plus its residual and positivity report.

    With ``balance=False`` all weights are 1, i.e. the metric of the chosen
    right-vector scaling (adequate for ``W = I``).  The bundle's vectors are
    rescaled so that ``Theta r = l`` and ``l^dagger W r = 1``.
    """
    H, W = sys.pencil.H, sys.pencil.W
    d = metric_weights(sys) if balance else np.ones(len(sys.eigenvalues))
    sq = np.sqrt(d)
    sys = BiorthogonalSystem(sys.pencil, sys.eigenvalues, sys.R / sq, sys.L * sq)
    theta = sys.L @ sys.L.conj().T @ W
    nt = np.linalg.norm(theta, 2)
    rH = np.linalg.norm(H.conj().T @ theta - theta @ H, 2) / (nt * np.linalg.norm(H, 2))
    rW = np.linalg.norm(W.conj().T @ theta - theta @ W, 2) / (nt * np.linalg.norm(W, 2))
    herm = np.linalg.norm(theta - theta.conj().T, 2) / nt
    TW = theta @ W
    TW = 0.5 * (TW + TW.conj().T)
    positivity = float(np.linalg.eigvalsh(TW).min())
    ortho = float(np.abs(sys.overlaps() - np.eye(len(sys.eigenvalues))).max())
    return MetricBundle(sys.eigenvalues, sys.R, sys.L, theta, (float(rH), float(rW)),
                        float(herm), positivity, ortho)


def completeness_residual(sys: BiorthogonalSystem) -> float:
    """Spectral norm of ``I - sum r l^dagger W``."""
    P = sys.R @ sys.L.conj().T @ sys.pencil.W
    return float(np.linalg.norm(np.eye(sys.pencil.dim) - P, 2))


def spectral_residuals(sys: BiorthogonalSystem) -> tuple[float, float]:
    """Relative errors of ``H = sum W r lambda l^dagger W`` and ``W = sum W r l^dagger W``."""
    H, W = sys.pencil.H, sys.pencil.W
    WR = W @ sys.R
    LW = sys.L.conj().T @ W
    Hs = WR @ np.diag(sys.eigenvalues) @ LW
    Ws = WR @ LW
    return (float(np.linalg.norm(H - Hs, 2) / np.linalg.norm(H, 2)),
            float(np.linalg.norm(W - Ws, 2) / np.linalg.norm(W, 2)))


def random_dyson_pencil(dim: int, seed: Optional[int] = None, cond_max: float = 1e3,
                        max_tries: int = 100, return_omega: bool = False):
    """``H = Omega^-1 h Omega``, ``W = Omega^-1 w Omega`` with Hermitian ``h`` and positive ``w``.

    The spectrum equals that of the Hermitian-definite pencil ``(h, w)`` and
    is therefore real.  ``Omega`` is redrawn until its condition number is
    at most ``cond_max``.
    """
    if dim < 2:
        raise MetricError("dim must be at least 2")
    rng = np.random.default_rng(seed)

    def cplx(n):
        return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))

    a = cplx(dim)
    h = 0.5 * (a + a.conj().T)
    b = cplx(dim)
    w = b @ b.conj().T / dim + np.eye(dim)
    for _ in range(max_tries):
        omega = np.eye(dim) + 0.5 * cplx(dim) / np.sqrt(dim)
        if np.linalg.cond(omega) <= cond_max:
            break
    else:
        raise MetricError("could not draw a well-conditioned Dyson map")
    oi = np.linalg.inv(omega)
    p = Pencil(oi @ h @ omega, oi @ w @ omega)
    return (p, omega) if return_omega else p
