from .metrics import auroc, aupr, evaluate_scores
from .inject import inject_structural, inject_contextual, inject_mixed
from .synth import synth_graph
