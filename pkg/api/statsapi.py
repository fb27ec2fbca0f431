import os

from api.other import Stage, add_graph_arguments, out_dir, write_json
from graph import heterophily_by_class, load_graph


def register(subparsers, parents):
    p = subparsers.add_parser('stats', parents=parents, help='heterophily ratio overall / anomalous / normal')
    add_graph_arguments(p, labels='required')
    p.set_defaults(handler=run)


def run(args) -> int:
    out = out_dir(args)
    with Stage('stats', out, {'edges': args.edges, 'attrs': args.attrs, 'labels': args.labels}) as stage:
        graph = load_graph(args.edges, args.attrs, args.labels)
        stats = heterophily_by_class(graph, graph.labels)
        stats.update(num_nodes=graph.num_nodes, num_edges=graph.num_edges,
                     num_anomalies=int(graph.labels.sum()))
        stage.add(write_json(stats, os.path.join(out, 'heterophily.json')))
        print(stats)
    return 0
