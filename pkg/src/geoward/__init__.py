"""Geographically constrained Ward clustering with alpha/K tuning."""

from .compare import adjusted_rand_index, ari_matrix, dendrogram_entanglement, entanglement, pearson_matrix
from .dissimilarity import (
    FeatureTable,
    feature_dissimilarity,
    mix_dissimilarities,
    normalize_matrix,
    standardize_features,
)
from .geometry import EarthModel, GeoPoint, geodesic_distance, geodesic_matrix
from .hierarchy import (
    Dendrogram,
    agglomerate,
    cluster_pseudo_inertia,
    cut,
    explained_inertia,
    normalized_explained,
    pseudo_inertia,
    ward_merge_cost,
    weighted_explained,
    within_inertia,
)
from .tuner import TuningGrid, TuningReport, alpha_curves, inertia_curve, tune
from .validity import calinski_harabasz, c_index, dunn, mcclain_rao, silhouette

__version__ = "0.1.0"
