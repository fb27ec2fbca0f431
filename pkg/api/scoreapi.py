import logging
import os

import numpy as np
import pandas as pd

from api.other import FLOAT_FORMAT, Stage, add_graph_arguments, out_dir, write_scores
from graph import load_graph
from model import load_checkpoint, score_nodes
from model.checkpoint import check_shapes
from model.trainer import init_parameters
from refine import load_topology
from utill.gen import make_rng

logger = logging.getLogger(__name__)


def register(subparsers, parents):
    p = subparsers.add_parser('score', parents=parents, help='anomaly score per node from a checkpoint')
    add_graph_arguments(p)
    p.add_argument('--topology', default=None, help='preprocess output (default <out-dir>/topology)')
    p.add_argument('--checkpoint', default=None, help='train output (default <out-dir>/checkpoint)')
    p.add_argument('--top', type=int, default=None, metavar='N', help='also write the N highest-scoring ids')
    p.set_defaults(handler=run)


def top_nodes(scores: np.ndarray, n: int) -> np.ndarray:
    """highest first, equal scores by node id"""
    order = np.lexsort((np.arange(len(scores)), -scores))
    return order[:n]


def run(args) -> int:
    out = out_dir(args)
    ckpt = args.checkpoint or os.path.join(out, 'checkpoint')
    topo_dir = args.topology or os.path.join(out, 'topology')
    inputs = {'edges': args.edges, 'attrs': args.attrs, 'checkpoint': os.path.join(ckpt, 'tensors.bin')}
    with Stage('score', out, inputs) as stage:
        graph = load_graph(args.edges, args.attrs, args.labels)
        topology = load_topology(topo_dir)
        params, center, manifest = load_checkpoint(ckpt)
        config = manifest.config
        expected = init_parameters(config, graph.num_features, make_rng(config.seed, 'init'))
        check_shapes(params, {k: v.shape for k, v in expected.items()})
        scores = score_nodes(graph, topology, config, params, center)
        stage.add(write_scores(scores, os.path.join(out, 'scores.csv')))
        if args.top:
            ids = top_nodes(scores, args.top)
            path = os.path.join(out, 'top.csv')
            pd.DataFrame({'node_id': ids, 'score': scores[ids]}).to_csv(path, index=False, float_format=FLOAT_FORMAT)
            stage.add(path)
        logger.info('scored %d nodes from checkpoint epoch %d', len(scores), manifest.epoch)
    return 0
