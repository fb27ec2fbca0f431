from .adjacency import WeightedAdjacency
from .curvature import (SparseDistribution, HopMetric, neighbor_distribution, wasserstein,
                        edge_curvature, all_curvatures, purified_adjacency)
from .graphlet import GdvMatrix, gdv
from .augment import augmented_adjacency
from .topology import RefinedTopology, build_topology, save_topology, load_topology, check_params
from .distributions import pair_tag, kappa_distribution, gdv_similarity_distribution
