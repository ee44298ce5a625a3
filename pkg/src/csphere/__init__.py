"""Complex-valued sphere decoding with circular prescreening for MIMO
maximum-likelihood detection over arbitrary two-dimensional constellations.
"""

from .constellation import (
    Constellation,
    avg_intra_sq_distance,
    load_constellation,
    make_psk,
    make_rect_qam,
    make_star_qam,
    normalize,
)
from .linalg import (
    QRCostModel,
    QRFactorization,
    derived_qr_family,
    pseudo_inverse,
    qr_givens,
    row_norms_sq,
)
from .channel import (
    MimoInstance,
    make_instance,
    radius_alpha,
    sample_channel,
    sample_noise,
    sample_symbols,
    snr_db_to_sigma2,
    substream_rng,
)
from .engine import (
    DetectorConfig,
    PreprocessedProblem,
    SearchStats,
    cc_test,
    detect_ml_bruteforce,
    order_children,
    ped_step,
    preprocess,
    residual_sq,
    search,
)
from .ordering import (
    PruningProfile,
    compute_pruning_profile,
    pac_full_order,
    pac_modified_order,
    pinv_order,
)
from .flops import FlopLedger, structural_totals
from .bounds import (
    BoundParams,
    beta_factors,
    csd_bound,
    empirical_level_counts,
    lemma_probabilities,
    sd_bound,
)
from .bench import (
    ConstellationSpec,
    DetectorSpec,
    ExperimentSpec,
    ResultRow,
    compare_report,
    emit_csv,
    emit_json,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "Constellation",
    "avg_intra_sq_distance",
    "load_constellation",
    "make_psk",
    "make_rect_qam",
    "make_star_qam",
    "normalize",
    "QRCostModel",
    "QRFactorization",
    "derived_qr_family",
    "pseudo_inverse",
    "qr_givens",
    "row_norms_sq",
    "MimoInstance",
    "make_instance",
    "radius_alpha",
    "sample_channel",
    "sample_noise",
    "sample_symbols",
    "snr_db_to_sigma2",
    "substream_rng",
    "DetectorConfig",
    "PreprocessedProblem",
    "SearchStats",
    "cc_test",
    "detect_ml_bruteforce",
    "order_children",
    "ped_step",
    "preprocess",
    "residual_sq",
    "search",
    "PruningProfile",
    "compute_pruning_profile",
    "pac_full_order",
    "pac_modified_order",
    "pinv_order",
    "FlopLedger",
    "structural_totals",
    "BoundParams",
    "beta_factors",
    "csd_bound",
    "empirical_level_counts",
    "lemma_probabilities",
    "sd_bound",
    "ConstellationSpec",
    "DetectorSpec",
    "ExperimentSpec",
    "ResultRow",
    "compare_report",
    "emit_csv",
    "emit_json",
    "run_experiment",
]
