from .graphModels import AttributedGraph, NodeSplits
from .graphio import load_graph, save_graph, load_splits, save_splits
from .ops import split_nodes, heterophily_ratio, heterophily_by_class
