"""Determinantal consensus clustering.

Builds consensus clusterings from many Voronoi partitions whose generator
points are sampled by a determinantal point process over a Gaussian-kernel
similarity matrix; includes uniform and k-means++ baselines, kernel-based
model selection, external quality metrics, and a Gaussian-mixture benchmark
generator.
"""

from .bench import BenchmarkResult, benchmark, diversity_series
from .consensus import (
    Clustering,
    ConsensusConfig,
    ConsensusMatrix,
    accumulate,
    candidate_clusterings,
    merge_small,
    threshold_components,
)
from .errors import (
    ClusterError,
    ConfigError,
    CsvFormatError,
    DataError,
    DegenerateData,
    DegenerateScatter,
    GenerationExhausted,
    NoCandidates,
    NumericalError,
    NumericalFailure,
    ResampleExhausted,
    ShapeMismatch,
    SingletonClusterWarning,
)
from .kernel import (
    BandwidthConfig,
    KernelMatrix,
    SpectralDecomposition,
    build_rbf_kernel,
    eigendecompose,
    estimate_bandwidth,
    pairwise_sq_dists,
)
from .metrics import ContingencyTable, ari, contingency, rn
from .partition import Partition, lloyd_kmeans, voronoi_assign
from .pipeline import (
    KernelArtifacts,
    PipelineConfig,
    RunReport,
    build_artifacts,
    ensemble_runs,
    run_pipeline,
    select_clustering,
)
from .preprocess import boxcox_transform, standardize
from .rng import RngStream
from .sampling import (
    BaselineConfig,
    GeneratorSet,
    default_k_max,
    dpp_log_likelihood,
    kmeanspp_init,
    sample_dpp,
    sample_uniform,
)
from .simgen import (
    LabeledDataset,
    MixtureModel,
    ScenarioSpec,
    estimate_overlap,
    generate_mixture,
    generate_mixture_fixed,
    scenario_grid,
)
from .validation import (
    ScatterReport,
    SelectionResult,
    kvi,
    scatter,
    similarity_ratio,
)

__version__ = "0.1.0"
