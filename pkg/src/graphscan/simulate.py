"""Signal generation, canonical clusters, and Monte Carlo ROC experiments.

Replicates are embarrassingly parallel: replicate r of an experiment with seed
s draws from the stream keyed by (s, r) (null replicates use r in
[0, reps_null), alternative replicates continue at reps_null + r), so output
is byte-identical for any worker count. See :mod:`graphscan.rng` for the
stream derivation.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .detectors import Detector
from .graphs import Cluster, Graph, gen_bbt, gen_lattice, gen_kron_multiscale, two_triangles
from .rng import replicate_rng

__all__ = [
    "SignalSpec",
    "ExperimentConfig",
    "RocCurve",
    "sample_observation",
    "canonical_cluster",
    "snr",
    "run_roc",
    "auc",
    "build_experiment_graph",
    "preset_config",
    "PRESET_NAMES",
    "write_roc_csv",
    "parse_config_file",
]

PRESET_NAMES = ("bbt-fig1", "lattice-fig1", "kron-fig1")

_FAMILIES = ("bbt", "lattice", "kron")


@dataclass(frozen=True)
class SignalSpec:
    """Piecewise-constant mean: mu everywhere, mu + delta on the cluster.

    ``cluster=None`` means the null (constant) signal; under the alternative
    the gap must be nonzero and the cluster a nonempty proper subset.
    """

    n: int
    mu: float
    delta: float
    cluster: Cluster | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.cluster is not None:
            if self.delta == 0.0:
                raise ValueError("alternative signal requires delta != 0")
            if max(self.cluster.members) >= self.n or self.cluster.size >= self.n:
                raise ValueError("cluster must be a nonempty proper subset of 0..n-1")

    @property
    def is_null(self) -> bool:
        return self.cluster is None

    def beta(self) -> np.ndarray:
        mean = np.full(self.n, float(self.mu))
        if self.cluster is not None:
            mean[sorted(self.cluster.members)] += self.delta
        return mean


def sample_observation(spec: SignalSpec, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """One draw y = beta + sigma * eps with iid standard normal eps."""
    sigma = float(sigma)
    if sigma < 0.0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    return spec.beta() + sigma * rng.standard_normal(spec.n)


def snr(spec: SignalSpec, sigma: float) -> float:
    """Separation-to-noise ratio sqrt(|C| |C~| / n) * |delta| / sigma."""
    if spec.is_null:
        raise ValueError("SNR is undefined for a null signal")
    sigma = float(sigma)
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    k = spec.cluster.size
    return math.sqrt(k * (spec.n - k) / spec.n) * abs(spec.delta) / sigma


def canonical_cluster(g: Graph, family: str, **params) -> Cluster:
    """The activated cluster used by the reference experiments for each family.

    bbt:     subtree rooted at a depth-2 node (``node``, default the leftmost,
             id 3); requires ``depth``.
    lattice: the (p//2) x (p//2) square in the top-left corner; requires ``p``.
    kron:    all vertices whose coarsest-scale coordinate falls in a half of
             the base graph (``base_half``, default the first base_n//2
             vertices); requires ``base_n`` and ``levels``.

    Raises if the graph size does not match the declared family parameters.
    """
    if family == "bbt":
        depth = int(params["depth"])
        if depth < 2:
            raise ValueError("bbt cluster requires depth >= 2")
        if g.n != 2 ** (depth + 1) - 1:
            raise ValueError(f"graph has n={g.n}, not a depth-{depth} balanced binary tree")
        root = int(params.get("node", 3))
        if not 3 <= root <= 6:
            raise ValueError(f"depth-2 node id must be in 3..6, got {root}")
        members = []
        frontier = [root]
        while frontier:
            v = frontier.pop()
            members.append(v)
            for child in (2 * v + 1, 2 * v + 2):
                if child < g.n:
                    frontier.append(child)
        return Cluster(frozenset(members))

    if family == "lattice":
        p = int(params["p"])
        if g.n != p * p:
            raise ValueError(f"graph has n={g.n}, not a {p}x{p} lattice")
        half = p // 2
        return Cluster(frozenset(r * p + c for r in range(half) for c in range(half)))

    if family == "kron":
        base_n = int(params["base_n"])
        levels = int(params["levels"])
        if g.n != base_n**levels:
            raise ValueError(f"graph has n={g.n}, not a {levels}-level product of a {base_n}-vertex base")
        base_half = frozenset(params.get("base_half", range(base_n // 2)))
        if not base_half or any(not 0 <= v < base_n for v in base_half):
            raise ValueError("base_half must be a nonempty subset of the base vertices")
        block = base_n ** (levels - 1)
        return Cluster(frozenset(v for v in range(g.n) if v // block in base_half))

    raise ValueError(f"unknown family {family!r}; expected one of {_FAMILIES}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one ROC experiment.

    ``params`` holds the family parameters (bbt: depth; lattice: p, periodic;
    kron: levels, with the two-triangle base). ``cluster=None`` selects the
    family's canonical cluster.
    """

    family: str
    params: dict = field(default_factory=dict)
    mu: float = 0.0
    delta: float = 1.0
    sigma: float = 1.0
    rho: float = 1.0
    reps_null: int = 500
    reps_alt: int = 500
    seed: int = 0
    detectors: tuple[str, ...] = ("sss", "energy", "edge", "glr_unconstrained")
    cluster: frozenset | None = None

    def __post_init__(self) -> None:
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.reps_null < 1 or self.reps_alt < 1:
            raise ValueError("replicate counts must be >= 1")
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")
        for kind in self.detectors:
            Detector(kind, rho=self.rho if kind in ("sss", "glr_exact") else None)


@dataclass(frozen=True)
class RocCurve:
    """Ordered (threshold, size, power) triples; rates fall as the threshold rises."""

    points: tuple[tuple[float, float, float], ...]

    def __post_init__(self) -> None:
        prev_threshold = -math.inf
        prev_size, prev_power = 1.0 + 1e-12, 1.0 + 1e-12
        for threshold, size, power in self.points:
            if threshold < prev_threshold:
                raise ValueError("points must be ordered by ascending threshold")
            if not (0.0 <= size <= 1.0 and 0.0 <= power <= 1.0):
                raise ValueError(f"rates outside [0,1] at threshold {threshold}")
            if size > prev_size or power > prev_power:
                raise ValueError("size and power must be non-increasing in the threshold")
            prev_threshold, prev_size, prev_power = threshold, size, power

    def sizes(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    def powers(self) -> np.ndarray:
        return np.array([p[2] for p in self.points])


def build_experiment_graph(config: ExperimentConfig) -> Graph:
    """Instantiate the graph a config describes."""
    params = config.params
    if config.family == "bbt":
        return gen_bbt(int(params["depth"]))
    if config.family == "lattice":
        return gen_lattice(int(params["p"]), periodic=bool(params.get("periodic", False)))
    return gen_kron_multiscale(two_triangles(), int(params["levels"]))


def _resolve_cluster(config: ExperimentConfig, g: Graph) -> Cluster:
    if config.cluster is not None:
        return Cluster(frozenset(config.cluster))
    params = dict(config.params)
    if config.family == "kron":
        params.setdefault("base_n", two_triangles().n)
    return canonical_cluster(g, config.family, **params)


def run_roc(config: ExperimentConfig, threads: int | None = None) -> dict[str, RocCurve]:
    """Monte Carlo ROC estimate for every detector in the config.

    Sweeps the thresholds over all distinct null-statistic values; at each
    threshold tau the empirical size (power) is the fraction of null
    (alternative) statistics strictly above tau. Deterministic given the seed.
    """
    g = build_experiment_graph(config)
    detectors = {
        kind: Detector(kind, rho=config.rho if kind in ("sss", "glr_exact") else None)
        for kind in config.detectors
    }
    null_spec = SignalSpec(n=g.n, mu=config.mu, delta=0.0, cluster=None)
    if config.delta == 0.0:
        alt_spec = null_spec
    else:
        alt_spec = SignalSpec(
            n=g.n, mu=config.mu, delta=config.delta, cluster=_resolve_cluster(config, g)
        )

    def one(args: tuple[SignalSpec, int]) -> list[float]:
        spec, index = args
        y = sample_observation(spec, config.sigma, replicate_rng(config.seed, index))
        return [det.statistic(g, y) for det in detectors.values()]

    jobs = [(null_spec, r) for r in range(config.reps_null)]
    jobs += [(alt_spec, config.reps_null + r) for r in range(config.reps_alt)]
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, jobs))
    else:
        rows = [one(job) for job in jobs]
    stats = np.array(rows)

    curves: dict[str, RocCurve] = {}
    for j, kind in enumerate(detectors):
        null_sorted = np.sort(stats[: config.reps_null, j])
        alt_sorted = np.sort(stats[config.reps_null :, j])
        thresholds = np.unique(null_sorted)
        sizes = 1.0 - np.searchsorted(null_sorted, thresholds, side="right") / config.reps_null
        powers = 1.0 - np.searchsorted(alt_sorted, thresholds, side="right") / config.reps_alt
        curves[kind] = RocCurve(
            points=tuple(
                (float(t), float(s), float(p)) for t, s, p in zip(thresholds, sizes, powers)
            )
        )
    return curves


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under power versus size.

    The curve is closed with (size 0, power at the largest threshold) on the
    left and (1, 1) on the right before integrating.
    """
    pts = sorted((size, power) for _, size, power in curve.points)
    left_power = min(power for size, power in pts if size == pts[0][0]) if pts else 1.0
    xs = [0.0] + [size for size, _ in pts] + [1.0]
    ys = [left_power] + [power for _, power in pts] + [1.0]
    area = 0.0
    for i in range(len(xs) - 1):
        area += 0.5 * (ys[i] + ys[i + 1]) * (xs[i + 1] - xs[i])
    return area


def preset_config(name: str, seed: int | None = None) -> ExperimentConfig:
    """Named experiment presets reproducing the reference ROC comparisons.

    All three put the gap-to-noise ratio at 0.8 with 500 + 500 replicates on
    the family's canonical cluster:

      bbt-fig1:     depth-7 balanced binary tree (n=255), rho = 4/n
      lattice-fig1: 16x16 grid (n=256), rho = 4/sqrt(n)
      kron-fig1:    2-level product of the two-triangle base (n=36), rho = 4/n
    """
    if name == "bbt-fig1":
        n = 255
        config = ExperimentConfig(
            family="bbt", params={"depth": 7}, delta=0.8, sigma=1.0, rho=4.0 / n, seed=7
        )
    elif name == "lattice-fig1":
        config = ExperimentConfig(
            family="lattice", params={"p": 16}, delta=0.8, sigma=1.0, rho=4.0 / 16.0, seed=7
        )
    elif name == "kron-fig1":
        n = 36
        config = ExperimentConfig(
            family="kron", params={"levels": 2}, delta=0.8, sigma=1.0, rho=4.0 / n, seed=7
        )
    else:
        raise ValueError(f"unknown preset {name!r}; expected one of {PRESET_NAMES}")
    if seed is not None:
        config = replace(config, seed=int(seed))
    return config


def write_roc_csv(curve: RocCurve, path) -> None:
    """CSV with header ``threshold,size,power``, 17 significant digits per value."""
    lines = ["threshold,size,power"]
    lines.extend(f"{t:.17g},{s:.17g},{p:.17g}" for t, s, p in curve.points)
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_detectors(raw: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in raw.split(",") if part.strip())


def parse_config_file(path) -> ExperimentConfig:
    """Read a flat ``key = value`` experiment description.

    Recognized keys: family (bbt|lattice|kron), depth, p, periodic, levels,
    mu, delta, sigma, rho, reps_null, reps_alt, seed, detectors (comma list),
    cluster (``canonical`` or a comma list of vertex ids).
    """
    entries: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        entries[key.strip()] = value.strip()

    try:
        family = entries.pop("family")
    except KeyError:
        raise ValueError(f"{path}: missing required key 'family'") from None
    params: dict = {}
    for key, cast in (("depth", int), ("p", int), ("levels", int)):
        if key in entries:
            params[key] = cast(entries.pop(key))
    if "periodic" in entries:
        params["periodic"] = entries.pop("periodic").lower() in ("1", "true", "yes")

    cluster = None
    raw_cluster = entries.pop("cluster", "canonical")
    if raw_cluster != "canonical":
        cluster = frozenset(int(v) for v in raw_cluster.split(","))

    kwargs: dict = {}
    for key, cast in (
        ("mu", float),
        ("delta", float),
        ("sigma", float),
        ("rho", float),
        ("reps_null", int),
        ("reps_alt", int),
        ("seed", int),
    ):
        if key in entries:
            kwargs[key] = cast(entries.pop(key))
    if "detectors" in entries:
        kwargs["detectors"] = _parse_detectors(entries.pop("detectors"))
    if entries:
        raise ValueError(f"{path}: unknown keys {sorted(entries)}")
    return ExperimentConfig(family=family, params=params, cluster=cluster, **kwargs)
