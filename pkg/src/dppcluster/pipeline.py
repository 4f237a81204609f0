"""End-to-end orchestration: kernel built once, R partition runs (serial or
process-parallel), consensus accumulation, candidate selection, and quality
metrics.

Every run r draws from its own random stream (seed, r), and the consensus
counts merge by integer addition, so results are byte-identical no matter
how many workers execute the runs or in which order they finish.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .consensus import (
    Clustering,
    ConsensusConfig,
    ConsensusMatrix,
    accumulate,
    candidate_clusterings,
)
from .errors import ConfigError
from .kernel import (
    BandwidthConfig,
    KernelMatrix,
    SpectralDecomposition,
    as_data_matrix,
    build_rbf_kernel,
    eigendecompose,
    estimate_bandwidth,
    pairwise_sq_dists,
)
from .metrics import ari, rn
from .partition import Partition, lloyd_kmeans, voronoi_assign
from .preprocess import apply_preprocessing
from .rng import RngStream
from .sampling import (
    BaselineConfig,
    GeneratorSet,
    default_k_max,
    dpp_log_likelihood,
    kmeanspp_indices,
    sample_dpp,
    sample_uniform,
)
from .validation import SelectionResult, kvi, scatter

__all__ = [
    "PipelineConfig",
    "KernelArtifacts",
    "EnsembleResult",
    "RunReport",
    "build_artifacts",
    "ensemble_runs",
    "select_clustering",
    "run_pipeline",
]

METHODS = ("dpp", "uniform", "kmeans")


@dataclass(frozen=True)
class PipelineConfig:
    """Everything needed to reproduce one clustering run end to end."""

    method: str = "dpp"
    consensus: ConsensusConfig = field(default_factory=ConsensusConfig)
    s: float = 1.0
    k_max: int | None = None
    seed: int = 0
    preprocessing: str = "none"
    workers: int = 1
    repetitions: int = 10

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.preprocessing not in ("none", "standardize", "boxcox"):
            raise ConfigError(f"unknown preprocessing {self.preprocessing!r}")
        if not self.s > 0:
            raise ConfigError("bandwidth factor s must be positive")
        if self.k_max is not None and int(self.k_max) < 2:
            raise ConfigError("k_max must be at least 2")
        if int(self.workers) < 1:
            raise ConfigError("workers must be at least 1")
        if int(self.repetitions) < 1:
            raise ConfigError("repetitions must be at least 1")


@dataclass(frozen=True)
class KernelArtifacts:
    """Immutable per-dataset state shared by all runs."""

    data: np.ndarray
    sq_dists: np.ndarray
    sigma2_hat: float
    kernel: KernelMatrix
    spectral: SpectralDecomposition
    log_det_norm: float

    @property
    def n(self) -> int:
        return self.data.shape[0]


def build_artifacts(data, s: float = 1.0, preprocessing: str = "none") -> KernelArtifacts:
    """Preprocess, then build the shared distance matrix, kernel, and
    spectral decomposition for a dataset."""
    x = apply_preprocessing(data, preprocessing)
    d2 = pairwise_sq_dists(x)
    sigma2 = estimate_bandwidth(x, sq_dists=d2)
    kernel = build_rbf_kernel(x, BandwidthConfig(sigma2, s), sq_dists=d2)
    spectral = eigendecompose(kernel)
    return KernelArtifacts(x, d2, sigma2, kernel, spectral, spectral.log_det_plus_identity())


@dataclass
class EnsembleResult:
    """Partitions plus per-run diagnostics, ordered by run index."""

    partitions: list[Partition]
    subset_sizes: np.ndarray
    log_likelihoods: np.ndarray


def _one_run(run_idx, method, seed, n, k_max, data, sq_dists, spectral, kernel, log_det_norm):
    stream = RngStream(seed, run_idx)
    if method == "dpp":
        gens = sample_dpp(spectral, stream)
        part = voronoi_assign(data, gens, sq_dists=sq_dists)
    elif method == "uniform":
        gens = sample_uniform(n, BaselineConfig(k_max), stream)
        part = voronoi_assign(data, gens, sq_dists=sq_dists)
    else:  # kmeans: uniform size draw, k-means++ seeding, Lloyd refinement
        g = stream.generator
        k = int(g.integers(2, k_max + 1))
        idx = kmeanspp_indices(data, k, g)
        part = lloyd_kmeans(data, data[list(idx)])
        gens = GeneratorSet(idx, "kmeanspp")
    loglik = dpp_log_likelihood(kernel, gens, log_det_norm=log_det_norm)
    return part.labels, part.k, len(gens), loglik


_WORKER_PAYLOAD = None


def _init_worker(payload):
    global _WORKER_PAYLOAD
    _WORKER_PAYLOAD = payload


def _run_by_index(run_idx):
    return _one_run(run_idx, *_WORKER_PAYLOAD)


def ensemble_runs(
    artifacts: KernelArtifacts,
    cfg: PipelineConfig,
    method: str | None = None,
    runs: int | None = None,
) -> EnsembleResult:
    """Execute R independent partition runs over the shared artifacts."""
    method = method or cfg.method
    runs = runs or cfg.consensus.runs
    n = artifacts.n
    k_max = cfg.k_max if cfg.k_max is not None else default_k_max(n)
    if k_max > n:
        raise ConfigError(f"k_max={k_max} exceeds n={n}")
    payload = (
        method,
        cfg.seed,
        n,
        k_max,
        artifacts.data,
        artifacts.sq_dists,
        artifacts.spectral,
        artifacts.kernel,
        artifacts.log_det_norm,
    )
    if cfg.workers <= 1:
        results = [_one_run(r, *payload) for r in range(runs)]
    else:
        chunk = max(1, runs // (cfg.workers * 4))
        with ProcessPoolExecutor(
            max_workers=cfg.workers, initializer=_init_worker, initargs=(payload,)
        ) as pool:
            results = list(pool.map(_run_by_index, range(runs), chunksize=chunk))
    partitions = [Partition(lab, k) for lab, k, _, _ in results]
    sizes = np.array([r[2] for r in results], dtype=np.int64)
    logliks = np.array([r[3] for r in results], dtype=float)
    return EnsembleResult(partitions, sizes, logliks)


def select_clustering(
    kernel, consensus_matrix: ConsensusMatrix, cfg: ConsensusConfig, n: int
) -> SelectionResult:
    """Thresholds -> merged candidates -> index-based choice."""
    cands = candidate_clusterings(consensus_matrix, cfg, n)
    return kvi([(c, scatter(kernel, c)) for c in cands])


@dataclass
class RunReport:
    """Everything run_pipeline produced, JSON-serializable.

    ``timings`` are wall-clock seconds per stage; they are excluded from the
    serialized report by default so reports from identical (data, config)
    pairs compare byte-for-byte.
    """

    method: str
    n: int
    runs: int
    seed: int
    s: float
    preprocessing: str
    sigma2_hat: float
    labels: np.ndarray
    k_hat: int
    threshold: float | None
    merged: bool
    alpha: float
    candidates: tuple
    ari: float | None
    rn_signed: float | None
    rn_abs: float | None
    k_true: int | None
    subset_sizes: np.ndarray
    log_likelihoods: np.ndarray
    consensus: ConsensusMatrix
    selection: SelectionResult
    timings: dict[str, float]

    def to_dict(self, include_timings: bool = False) -> dict:
        def num(v):
            if v is None:
                return None
            v = float(v)
            return v if np.isfinite(v) else None

        out = {
            "method": self.method,
            "n": self.n,
            "runs": self.runs,
            "seed": self.seed,
            "s": num(self.s),
            "preprocessing": self.preprocessing,
            "sigma2_hat": num(self.sigma2_hat),
            "k_hat": self.k_hat,
            "threshold": num(self.threshold),
            "merged": self.merged,
            "alpha": num(self.alpha),
            "labels": [int(v) for v in self.labels],
            "candidates": [
                {
                    "threshold": num(c.threshold),
                    "k": c.k,
                    "w_v": num(c.w_v),
                    "b_tilde": num(c.b_tilde),
                    "sr": num(c.sr),
                    "kvi": num(c.kvi),
                    "excluded": c.excluded,
                    "reason": c.reason,
                }
                for c in self.candidates
            ],
            "metrics": (
                None
                if self.ari is None
                else {
                    "ari": num(self.ari),
                    "rn": num(self.rn_signed),
                    "rn_abs": num(self.rn_abs),
                    "k_true": self.k_true,
                }
            ),
            "diagnostics": {
                "subset_sizes": [int(v) for v in self.subset_sizes],
                "log_likelihoods": [num(v) for v in self.log_likelihoods],
            },
        }
        if include_timings:
            out["timings"] = {k: float(v) for k, v in self.timings.items()}
        return out

    def to_json(self, include_timings: bool = False) -> str:
        return json.dumps(self.to_dict(include_timings), indent=2, sort_keys=True)


def run_pipeline(data, cfg: PipelineConfig, truth: Sequence[int] | None = None) -> RunReport:
    """Cluster one dataset end to end under ``cfg``.

    Builds the kernel and its decomposition once, runs R sampling+partition
    rounds, accumulates the consensus matrix, extracts candidates over the
    threshold grid, picks the index-minimizing clustering, and scores it
    against ``truth`` when labels are supplied.
    """
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    artifacts = build_artifacts(data, s=cfg.s, preprocessing=cfg.preprocessing)
    timings["kernel"] = time.perf_counter() - t0
    n = artifacts.n

    t0 = time.perf_counter()
    ens = ensemble_runs(artifacts, cfg)
    timings["runs"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    consensus_matrix = accumulate(ens.partitions, n)
    timings["consensus"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    selection = select_clustering(artifacts.kernel, consensus_matrix, cfg.consensus, n)
    timings["selection"] = time.perf_counter() - t0

    chosen: Clustering = selection.chosen
    ari_val = rn_val = rn_abs_val = None
    k_true = None
    if truth is not None:
        truth_arr = np.asarray(truth)
        ari_val = ari(chosen.labels, truth_arr)
        k_true = int(np.unique(truth_arr).size)
        rn_val = rn(chosen.k, k_true)
        rn_abs_val = abs(rn_val)

    return RunReport(
        method=cfg.method,
        n=n,
        runs=cfg.consensus.runs,
        seed=cfg.seed,
        s=cfg.s,
        preprocessing=cfg.preprocessing,
        sigma2_hat=artifacts.sigma2_hat,
        labels=chosen.labels,
        k_hat=chosen.k,
        threshold=chosen.threshold,
        merged=chosen.merged,
        alpha=selection.alpha,
        candidates=selection.scores,
        ari=ari_val,
        rn_signed=rn_val,
        rn_abs=rn_abs_val,
        k_true=k_true,
        subset_sizes=ens.subset_sizes,
        log_likelihoods=ens.log_likelihoods,
        consensus=consensus_matrix,
        selection=selection,
        timings=timings,
    )
