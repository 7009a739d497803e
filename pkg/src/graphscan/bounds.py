"""Closed-form detectability quantities from the graph spectrum.

Rate expressions carry no asymptotic constants: they are the quantities inside
the growth conditions, useful for comparing topologies and sizes, not absolute
detection guarantees.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import Spectrum

__all__ = [
    "BoundsReport",
    "spectral_snr_bound",
    "truncated_bound",
    "null_threshold",
    "naive_bounds",
    "noncentrality",
    "bbt_lambda2_bound",
    "bounds_report",
    "format_report",
]


@dataclass(frozen=True)
class BoundsReport:
    """All detectability quantities for one (graph, rho, sigma) instance."""

    n: int
    rho: float
    spectral_sum_bound: float
    truncated_bound: float | None
    truncated_k: int | None
    energy_bound: float
    edge_bound: float
    null_threshold: float
    confidence: float
    eta: float | None = None


def _positive_lambdas(spectrum: Spectrum) -> np.ndarray:
    lambdas = spectrum.eigenvalues[1:]
    if lambdas.size == 0 or lambdas[0] <= 0.0:
        raise ValueError("spectrum does not come from a connected graph (lambda_2 <= 0)")
    return lambdas


def spectral_snr_bound(spectrum: Spectrum, rho: float) -> float:
    """sqrt(sum over i >= 2 of min(1, rho / lambda_i)).

    The SNR must grow faster than this for the scan statistic to separate the
    hypotheses; it never exceeds sqrt(n - 1), with equality once rho >= lambda_n.
    """
    rho = float(rho)
    if rho <= 0.0:
        raise ValueError(f"rho must be positive, got {rho}")
    lambdas = _positive_lambdas(spectrum)
    return math.sqrt(float(np.minimum(1.0, rho / lambdas).sum()))


def truncated_bound(spectrum: Spectrum, rho: float) -> tuple[float, int]:
    """min over k with lambda_{k+1} > rho of sqrt(k + (n-k) rho / lambda_{k+1}).

    Returns the bound and the minimizing k (smallest on ties); always at least
    :func:`spectral_snr_bound` on the same inputs. Raises when no eigenvalue
    exceeds rho.
    """
    rho = float(rho)
    if rho <= 0.0:
        raise ValueError(f"rho must be positive, got {rho}")
    lambdas = _positive_lambdas(spectrum)
    n = spectrum.n
    best: tuple[float, int] | None = None
    for k in range(1, n):
        lam_next = float(lambdas[k - 1])  # lambda_{k+1} in 1-based spectrum order
        if lam_next <= rho:
            continue
        value = math.sqrt(k + (n - k) * rho / lam_next)
        if best is None or value < best[0]:
            best = (value, k)
    if best is None:
        raise ValueError(f"no admissible k: largest eigenvalue {lambdas[-1]} <= rho={rho}")
    return best


def null_threshold(spectrum: Spectrum, rho: float, sigma: float, conf: float) -> float:
    """Analytic threshold with false-alarm probability at most ``conf``.

    (sqrt(2 sigma^2 sum min(1, rho/lambda_i)) + sqrt(2 sigma^2 log(2/conf)))^2;
    the scan statistic exceeds this under the null with probability <= conf.
    """
    conf = float(conf)
    if not 0.0 < conf < 1.0:
        raise ValueError(f"confidence level must be in (0, 1), got {conf}")
    sigma = float(sigma)
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    expectation = math.sqrt(2.0 * sigma**2) * spectral_snr_bound(spectrum, rho)
    deviation = math.sqrt(2.0 * sigma**2 * math.log(2.0 / conf))
    return (expectation + deviation) ** 2


def naive_bounds(n: int, max_cluster: int) -> tuple[float, float]:
    """Rate expressions for the energy and edge-threshold detectors.

    Returns (sqrt(n - 1), sqrt(max_cluster * log n)) where ``max_cluster`` is
    the largest cluster size (at most n/2) in the class under test.
    """
    n = int(n)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    max_cluster = int(max_cluster)
    if not 1 <= max_cluster <= n // 2:
        raise ValueError(f"max_cluster must be in 1..n//2, got {max_cluster}")
    return math.sqrt(n - 1.0), math.sqrt(max_cluster * math.log(n))


def noncentrality(delta: float, sigma: float, cluster_size: int, n: int) -> float:
    """Noncentrality (delta/sigma)^2 |C| (n - |C|) / n of the oracle likelihood ratio."""
    sigma = float(sigma)
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    cluster_size = int(cluster_size)
    if not 0 < cluster_size < n:
        raise ValueError(f"cluster size must be in 1..n-1, got {cluster_size}")
    return (float(delta) / sigma) ** 2 * cluster_size * (n - cluster_size) / n


def bbt_lambda2_bound(depth: int) -> float:
    """Upper bound 2**depth + 105*[depth < 4] on 1/lambda_2 of the balanced binary tree."""
    depth = int(depth)
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    return float(2**depth + (105 if depth < 4 else 0))


def bounds_report(
    spectrum: Spectrum,
    rho: float,
    sigma: float,
    conf: float,
    max_cluster: int | None = None,
    eta: float | None = None,
) -> BoundsReport:
    """Assemble every bound for one instance; truncated entries are None when
    no eigenvalue exceeds rho."""
    n = spectrum.n
    if max_cluster is None:
        max_cluster = n // 2
    energy, edge = naive_bounds(n, max_cluster)
    try:
        trunc_value, trunc_k = truncated_bound(spectrum, rho)
    except ValueError:
        trunc_value, trunc_k = None, None
    return BoundsReport(
        n=n,
        rho=float(rho),
        spectral_sum_bound=spectral_snr_bound(spectrum, rho),
        truncated_bound=trunc_value,
        truncated_k=trunc_k,
        energy_bound=energy,
        edge_bound=edge,
        null_threshold=null_threshold(spectrum, rho, sigma, conf),
        confidence=float(conf),
        eta=None if eta is None else float(eta),
    )


def format_report(report: BoundsReport) -> str:
    """Serialize a report as ``key = value`` lines."""
    def fmt(value) -> str:
        if value is None:
            return "none"
        if isinstance(value, float):
            return f"{value:.17g}"
        return str(value)

    keys = (
        "n",
        "rho",
        "spectral_sum_bound",
        "truncated_bound",
        "truncated_k",
        "energy_bound",
        "edge_bound",
        "null_threshold",
        "confidence",
        "eta",
    )
    return "\n".join(f"{key} = {fmt(getattr(report, key))}" for key in keys) + "\n"
