"""Spectral clustering with automatic scale and cluster-count selection."""

__version__ = "0.1.0"

from .algorithm import SpudsConfig, SpudsResult, merge_outliers, spuds_cluster
from .dataset import DataMatrix, load_csv, load_labels
from .density import SeparationConfig, boundary_points, is_density_separated
from .eigen import SpectralEmbedder, spectral_embed, smallest_eigenpairs
from .graph import (
    Partition,
    SimilarityGraph,
    build_graph,
    cut_value,
    laplacian,
    ncut_value,
    point_density,
    ratio_cut_value,
)
from .kmeans import KMeansConfig, kmeans
from .metrics import contingency_table, nmi
from .scale import compute_sigma, kaiser_intrinsic_dim

__all__ = [
    "DataMatrix",
    "KMeansConfig",
    "Partition",
    "SeparationConfig",
    "SimilarityGraph",
    "SpectralEmbedder",
    "SpudsConfig",
    "SpudsResult",
    "boundary_points",
    "build_graph",
    "compute_sigma",
    "contingency_table",
    "cut_value",
    "is_density_separated",
    "kaiser_intrinsic_dim",
    "kmeans",
    "laplacian",
    "load_csv",
    "load_labels",
    "merge_outliers",
    "ncut_value",
    "nmi",
    "point_density",
    "ratio_cut_value",
    "smallest_eigenpairs",
    "spectral_embed",
    "spuds_cluster",
]
