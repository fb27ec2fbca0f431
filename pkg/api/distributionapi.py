import logging
import os

from api.other import FLOAT_FORMAT, Stage, add_graph_arguments, out_dir, write_json
from config import Config
from graph import load_graph
from refine import gdv_similarity_distribution, kappa_distribution, load_topology
from refine.distributions import summarize

logger = logging.getLogger(__name__)


def register(subparsers, parents):
    p = subparsers.add_parser('distributions', parents=parents,
                              help='per-edge curvature and per-pair GDV similarity tagged aa/an/nn')
    add_graph_arguments(p, labels='required')
    p.add_argument('--topology', default=None, help='preprocess output (default <out-dir>/topology)')
    p.add_argument('--max-nn-pairs', type=int, default=Config['distributions']['max_nn_pairs'])
    p.set_defaults(handler=run)


def run(args) -> int:
    out = out_dir(args)
    topo_dir = args.topology or os.path.join(out, 'topology')
    seed = args.seed if args.seed is not None else Config['train']['seed']
    inputs = {'edges': args.edges, 'attrs': args.attrs, 'labels': args.labels}
    with Stage('distributions', out, inputs, {'max_nn_pairs': args.max_nn_pairs, 'seed': seed}) as stage:
        graph = load_graph(args.edges, args.attrs, args.labels)
        topology = load_topology(topo_dir)
        kappa = kappa_distribution(topology.edges, topology.raw_curvatures, graph.labels)
        sims = gdv_similarity_distribution(topology.gdv, graph.labels, args.max_nn_pairs, seed)
        paths = [os.path.join(out, 'kappa.csv'), os.path.join(out, 'gdv_similarity.csv')]
        kappa.to_csv(paths[0], index=False, float_format=FLOAT_FORMAT)
        sims.to_csv(paths[1], index=False, float_format=FLOAT_FORMAT)
        summary = {'kappa': summarize(kappa, 'kappa'), 'gdv_similarity': summarize(sims, 'sim')}
        for name, part in summary.items():
            for tag, s in part.items():
                logger.info('%s %s: %d values, mean %.4f', name, tag, s['count'], s['mean'])
        stage.add(*paths, write_json(summary, os.path.join(out, 'distribution_summary.json')))
    return 0
