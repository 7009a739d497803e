"""Symmetric eigendecomposition and the spectral scan statistic.

The scan statistic over a connected graph with Laplacian L is

    sup (x' y~)**2   subject to   ||x|| <= 1,  x' L x <= rho,  x' 1 = 0,

for the centered observation y~. It is computed here through its dual: after
rotating into the eigenbasis of L restricted to the complement of the constant
vector, the objective for a multiplier nu >= 0 is the largest eigenvalue of the
rank-one-plus-diagonal matrix c c' - nu * diag(lambda_2..lambda_n) plus
nu * rho, and the statistic is the minimum of that convex function over nu.
An independent primal solver (KKT case analysis) cross-checks the dual value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Spectrum",
    "SssResult",
    "eig_sym",
    "center",
    "chi_max",
    "sss",
    "sss_primal_oracle",
    "write_spectrum_csv",
]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in ascending order with a matching orthonormal basis.

    ``eigenvectors[:, i]`` is the unit eigenvector paired with
    ``eigenvalues[i]``. Arrays are frozen so a Spectrum can be shared across
    threads.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class SssResult:
    """Scan-statistic value with its dual multiplier and a feasible witness.

    ``witness`` lies in the feasible set (unit ball, Laplacian ellipsoid, mean
    zero) and attains the statistic up to solver tolerance; its first nonzero
    coordinate is positive.
    """

    value: float
    nu_star: float
    witness: np.ndarray


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its first non-negligible entry is positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        nz = np.nonzero(np.abs(col) > 1e-12 * np.abs(col).max())[0]
        if nz.size and col[nz[0]] < 0:
            out[:, j] = -col
    return out


def eig_sym(m: np.ndarray) -> Spectrum:
    """Full eigendecomposition of a symmetric matrix, deterministic per input.

    Raises if the input is not symmetric to within 1e-12 relative.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.abs(m).max()))
    if float(np.abs(m - m.T).max()) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    values, vectors = np.linalg.eigh(m)
    vectors = _fix_signs(vectors)
    values.flags.writeable = False
    vectors.flags.writeable = False
    return Spectrum(eigenvalues=values, eigenvectors=vectors)


def center(y: np.ndarray) -> np.ndarray:
    """Subtract the mean: y~ = (I - 11'/n) y."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size < 1:
        raise ValueError("expected a nonempty vector")
    return y - y.mean()


def chi_max(c: np.ndarray, lambdas: np.ndarray, nu: float) -> float:
    """Largest eigenvalue of c c' - nu * diag(lambdas) via the secular equation.

    ``lambdas`` must be strictly positive and ascending; ``nu`` must be
    nonnegative. Components with |c_i| <= 1e-14 * ||c|| are deflated: they
    contribute plain diagonal eigenvalues -nu * lambda_i. On the remaining
    active part, the largest eigenvalue is the unique root above
    -nu * min(active lambdas) of

        sum_i c_i**2 / (theta + nu * lambda_i) = 1,

    solved by bisection-safeguarded Newton. Matches a dense eigendecomposition
    of the same matrix to ~1e-9 relative at a cost of O(len(c)) per call.
    """
    c = np.asarray(c, dtype=float)
    lambdas = np.asarray(lambdas, dtype=float)
    if c.shape != lambdas.shape or c.ndim != 1:
        raise ValueError("c and lambdas must be vectors of equal length")
    if lambdas.size == 0:
        raise ValueError("need at least one eigenvalue")
    if np.any(lambdas <= 0.0):
        raise ValueError("lambdas must be strictly positive")
    if np.any(np.diff(lambdas) < 0.0):
        raise ValueError("lambdas must be ascending")
    nu = float(nu)
    if nu < 0.0:
        raise ValueError(f"nu must be nonnegative, got {nu}")

    norm_c = float(np.linalg.norm(c))
    active = np.abs(c) > 1e-14 * norm_c
    if nu == 0.0 or not active.any():
        # pure rank-one (||c||^2) or pure diagonal (-nu * smallest lambda)
        return norm_c**2 if active.any() else (-nu * float(lambdas[0]) if nu > 0.0 else 0.0)

    csq = c[active] ** 2
    lam = lambdas[active]
    deflated_top = -nu * float(lambdas[~active][0]) if (~active).any() else -math.inf

    # Shift so the pole of interest sits at zero: theta = -nu*lam_min + t, t > 0.
    d_max = -nu * float(lam[0])
    delta = nu * (lam - lam[0])
    total = float(csq.sum())

    def secular(t: float) -> tuple[float, float]:
        terms = csq / (t + delta)
        return float(terms.sum()), float((terms / (t + delta)).sum())

    lo, hi = 0.0, total  # f(0+) = +inf, f(total) <= 1
    t = total
    for _ in range(200):
        val, slope = secular(t)
        if val > 1.0:
            lo = t
        else:
            hi = t
        step = (val - 1.0) / slope  # Newton on decreasing convex f
        t_new = t + step
        if not (lo < t_new < hi):
            t_new = 0.5 * (lo + hi)
        if abs(t_new - t) <= 1e-15 * max(t, 1e-300):
            t = t_new
            break
        t = t_new
    theta = d_max + t
    return max(theta, deflated_top)


def _reduced_coeffs(spectrum: Spectrum, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients of centered y in the nonconstant eigenbasis, and lambda_2..n."""
    y = np.asarray(y, dtype=float)
    if y.shape != (spectrum.n,):
        raise ValueError(f"observation has length {y.size}, expected {spectrum.n}")
    lambdas = spectrum.eigenvalues[1:]
    if lambdas.size == 0 or lambdas[0] <= 1e-10:
        raise ValueError("spectrum does not come from a connected graph (lambda_2 <= 0)")
    ytilde = center(y)
    return spectrum.eigenvectors[:, 1:].T @ ytilde, lambdas


def _dual_objective(c: np.ndarray, lambdas: np.ndarray, nu: float, rho: float) -> float:
    # The clamp at zero accounts for the constant-vector direction, where the
    # full matrix y~ y~' - nu L always has eigenvalue 0; without it the dual
    # is no upper bound once the reduced matrix goes negative definite
    # (rho < lambda_2 regime).
    return max(0.0, chi_max(c, lambdas, nu)) + nu * rho


def _golden_min(f, lo: float, hi: float, rel_width: float):
    """Golden-section minimum of a convex f on [lo, hi]; returns (x, f(x)).

    Tracks the best of every evaluation including both endpoints, so the
    result never exceeds f at any probed point.
    """
    best_x, best_f = lo, f(lo)
    f_hi = f(hi)
    if f_hi < best_f:
        best_x, best_f = hi, f_hi
    a, b = lo, hi
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    tol = rel_width * max(hi - lo, 1e-300)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
        for x, fx in ((x1, f1), (x2, f2)):
            if fx < best_f:
                best_x, best_f = x, fx
    return best_x, best_f


def _primal_maximizer(c: np.ndarray, lambdas: np.ndarray, rho: float) -> np.ndarray:
    """Argmax of (c'z)^2 over the unit ball intersected with z' diag(lambdas) z <= rho.

    KKT case analysis:
      (a) z = c/||c|| when it already satisfies the ellipsoid;
      (b) z proportional to lambdas^-1 * c scaled onto the ellipsoid, when that
          point stays inside the unit ball;
      (c) otherwise both constraints are active: z(t)_i ~ c_i / (1 + t*lambda_i)
          normalized to the unit sphere, with t > 0 the root of
          z(t)' diag(lambdas) z(t) = rho (monotone in t, solved by bisection).
    """
    norm_c = float(np.linalg.norm(c))
    if norm_c == 0.0:
        return np.zeros_like(c)
    z = c / norm_c
    if float(z @ (lambdas * z)) <= rho:
        return z

    w = c / lambdas
    quad = float(w @ (lambdas * w))  # = c' diag(lambdas)^-1 c
    z = w * math.sqrt(rho / quad)
    if float(z @ z) <= 1.0:
        return z

    def ellipsoid_gap(t: float) -> float:
        zt = c / (1.0 + t * lambdas)
        zt /= np.linalg.norm(zt)
        return float(zt @ (lambdas * zt)) - rho

    t_hi = 1.0
    for _ in range(200):
        if ellipsoid_gap(t_hi) < 0.0:
            break
        t_hi *= 2.0
    t_lo = 0.0
    for _ in range(200):
        mid = 0.5 * (t_lo + t_hi)
        if ellipsoid_gap(mid) > 0.0:
            t_lo = mid
        else:
            t_hi = mid
        if t_hi - t_lo <= 1e-14 * max(t_hi, 1.0):
            break
    z = c / (1.0 + t_hi * lambdas)
    return z / np.linalg.norm(z)


def sss(spectrum: Spectrum, y: np.ndarray, rho: float) -> SssResult:
    """Spectral scan statistic via the one-dimensional convex dual.

    Minimizes max(0, chi_max(c, lambdas, nu)) + nu*rho over the bracket
    [0, ||y~||^2 / rho], which must contain the minimum since the objective is
    ||y~||^2 at nu = 0 and at least nu*rho everywhere. The bracket is expanded
    if the minimum lands on its right edge. A constant observation yields 0.
    """
    rho = float(rho)
    if rho <= 0.0:
        raise ValueError(f"rho must be positive, got {rho}")
    c, lambdas = _reduced_coeffs(spectrum, y)
    energy = float(c @ c)
    if energy == 0.0:
        return SssResult(value=0.0, nu_star=0.0, witness=np.zeros(spectrum.n))

    def objective(nu: float) -> float:
        return _dual_objective(c, lambdas, nu, rho)

    hi = energy / rho
    for _ in range(60):
        nu_star, value = _golden_min(objective, 0.0, hi, rel_width=1e-10)
        if nu_star < hi * (1.0 - 1e-6):
            break
        hi *= 4.0

    z = _primal_maximizer(c, lambdas, rho)
    witness = spectrum.eigenvectors[:, 1:] @ z
    nz = np.nonzero(np.abs(witness) > 1e-14 * max(1.0, float(np.abs(witness).max())))[0]
    if nz.size and witness[nz[0]] < 0:
        witness = -witness
    return SssResult(value=value, nu_star=nu_star, witness=witness)


def sss_primal_oracle(spectrum: Spectrum, y: np.ndarray, rho: float) -> float:
    """Scan statistic by direct primal KKT analysis; verification path for :func:`sss`."""
    rho = float(rho)
    if rho <= 0.0:
        raise ValueError(f"rho must be positive, got {rho}")
    c, lambdas = _reduced_coeffs(spectrum, y)
    if float(c @ c) == 0.0:
        return 0.0
    z = _primal_maximizer(c, lambdas, rho)
    return float(c @ z) ** 2


def write_spectrum_csv(spectrum: Spectrum, path, vectors_path=None) -> None:
    """Write eigenvalues one per line; optionally the basis in column-major order.

    All values use 17 significant digits, enough to round-trip doubles.
    """
    Path(path).write_text(
        "".join(f"{v:.17g}\n" for v in spectrum.eigenvalues)
    )
    if vectors_path is not None:
        cols = (spectrum.eigenvectors[:, j] for j in range(spectrum.n))
        Path(vectors_path).write_text(
            "".join(f"{x:.17g}\n" for col in cols for x in col)
        )
