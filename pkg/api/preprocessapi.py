import os

from config import Config
from graph import load_graph
from refine import build_topology, save_topology
from api.other import Stage, add_graph_arguments, out_dir, workers


def register(subparsers, parents):
    p = subparsers.add_parser('preprocess', parents=parents,
                              help='curvature-purified and GDV-augmented adjacencies (cached as CSV)')
    add_graph_arguments(p)
    p.add_argument('--tau', type=float, default=Config['refine']['tau'])
    p.add_argument('--max-graphlet-size', type=int, default=Config['refine']['max_graphlet_size'], choices=(3, 4))
    p.add_argument('--delta', type=float, default=Config['refine']['delta'])
    p.set_defaults(handler=run)


def run(args) -> int:
    out = out_dir(args)
    params = dict(tau=args.tau, max_graphlet_size=args.max_graphlet_size, delta=args.delta)
    with Stage('preprocess', out, {'edges': args.edges, 'attrs': args.attrs}, params) as stage:
        graph = load_graph(args.edges, args.attrs)
        topology = build_topology(graph, workers=workers(), **params)
        stage.add(*save_topology(topology, os.path.join(out, 'topology')))
    return 0
