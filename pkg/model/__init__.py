from .autodiff import ExpressionGraph, Node
from .gradcheck import finite_difference_check, GradCheckReport
from .encoder import EncoderStructure, BranchStructure, encode, hge_layer, encode_values
from .mhl import GlobalCenter, LossBreakdown, Objective, build_objective, derive_center
from .trainer import TrainHistory, adam_step, init_parameters, train, score_nodes, history_to_csv
from .checkpoint import save_checkpoint, load_checkpoint, config_hash
