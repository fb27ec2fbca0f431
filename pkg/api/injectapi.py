import os

import numpy as np

from api.other import Stage, add_graph_arguments, out_dir, write_json
from api.verifyModel import InjectionSpec
from config import Config
from graph import load_graph, save_graph
from metric import inject_contextual, inject_mixed, inject_structural


def register(subparsers, parents):
    p = subparsers.add_parser('inject', parents=parents, help='inject structural / contextual anomalies')
    add_graph_arguments(p)
    p.add_argument('--kind', choices=('mixed', 'structural', 'contextual'), default='mixed')
    p.add_argument('--rate', type=float, default=Config['inject']['rate'], help='anomaly budget for mixed')
    p.add_argument('--clique-size', type=int, default=Config['inject']['clique_size'])
    p.add_argument('--num-cliques', type=int, default=1)
    p.add_argument('--num-contextual', type=int, default=1)
    p.add_argument('--pool-size', type=int, default=Config['inject']['pool_size'])
    p.set_defaults(handler=run)


def run(args) -> int:
    out = out_dir(args)
    seed = args.seed if args.seed is not None else Config['train']['seed']
    inputs = {'edges': args.edges, 'attrs': args.attrs, 'labels': args.labels}
    params = dict(kind=args.kind, rate=args.rate, m=args.clique_size, cliques=args.num_cliques,
                  contextual=args.num_contextual, k=args.pool_size, seed=seed)
    with Stage('inject', out, inputs, params) as stage:
        graph = load_graph(args.edges, args.attrs, args.labels)
        before = np.zeros(graph.num_nodes, dtype=np.int64) if graph.labels is None else graph.labels
        if args.kind == 'mixed':
            injected, labels, spec = inject_mixed(graph, args.rate, args.clique_size, args.pool_size, seed)
        else:
            if args.kind == 'structural':
                injected, labels = inject_structural(graph, args.clique_size, args.num_cliques, seed)
            else:
                injected, labels = inject_contextual(graph, args.num_contextual, args.pool_size, seed)
            spec = InjectionSpec(kind=args.kind, clique_size=args.clique_size,
                                 num_cliques=args.num_cliques if args.kind == 'structural' else 0,
                                 num_contextual=args.num_contextual if args.kind == 'contextual' else 0,
                                 candidate_pool_size=args.pool_size, seed=seed,
                                 anomalies=np.flatnonzero((labels == 1) & (before == 0)).tolist())
        paths = [os.path.join(out, f) for f in ('edges.txt', 'attrs.txt', 'labels.txt')]
        save_graph(injected, *paths)
        stage.add(*paths, write_json(spec.dict(), os.path.join(out, 'injection.json')))
    return 0