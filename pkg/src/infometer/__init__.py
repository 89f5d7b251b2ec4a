"""infometer: information-theoretic measurement with estimator identities,
surrogate significance tests, and mandatory reporting manifests.

Two measure families share one toolkit. Sample-based estimators (entropy,
divergences, mutual information, transfer entropy, predictive information)
work on data and come with uncertainty and significance machinery.
System-level causal measures (effective information, integration, autonomy)
need the full transition model under intervention and are exact and
deterministic.
"""

from . import simulate
from .advisor import Query, Recommendation, recommend
from .causal import (Bipartition, CoarseGraining, SystemSplit, Tpm, autonomy_causal,
                     autonomy_causal_normalized, autonomy_observational, causal_emergence,
                     effective_information, load_tpm, partitioned_tpm, phi)
from .data import (DiscreteSeries, JointTable, ProbTable, SampleMatrix, check_stationarity,
                   discretize, joint_from_series, load_table, rank_transform, standardize)
from .divergence import NO_SMOOTHING, Smoothing, cross_entropy, jensen_shannon, kl_discrete
from .entropy import (EntropyEstimate, entropy_knn, entropy_miller_madow, entropy_plugin,
                      entropy_vasicek)
from .errors import (DegenerateInput, DimensionalityWarning, DisjointSupport, InfometerError,
                     InsufficientData, InvalidConfig, MissingField, SystemTooLarge)
from .inference import (CiResult, SignificanceResult, bootstrap_ci, correct_pvalues,
                        network_scan, surrogate_test)
from .knn import NeighborIndex
from .manifest import ReportManifest, build_manifest, parse_manifest
from .mi import MiEstimate, cmi_ksg, mi_gaussian_oracle, mi_ksg, mi_plugin
from .rng import RngSeed, as_seed
from .temporal import (DEFAULT_EMBEDDING, EmbeddingSpec, TeResult, active_information_storage,
                       embed, predictive_information, select_embedding_nonuniform,
                       transfer_entropy)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
