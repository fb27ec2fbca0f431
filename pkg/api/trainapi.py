import json
import os

from api.other import Stage, add_graph_arguments, add_train_arguments, out_dir, train_config
from graph import load_graph, save_splits, split_nodes
from model import history_to_csv, save_checkpoint, train
from refine import check_params, load_topology
from utill.errors import ConfigError


def register(subparsers, parents):
    p = subparsers.add_parser('train', parents=parents, help='train the encoder and hypersphere objective')
    add_graph_arguments(p)
    p.add_argument('--topology', default=None, help='preprocess output (default <out-dir>/topology)')
    add_train_arguments(p)
    p.set_defaults(handler=run)


def run(args) -> int:
    config = train_config(args)
    out = out_dir(args)
    topo_dir = args.topology or os.path.join(out, 'topology')
    inputs = {'edges': args.edges, 'attrs': args.attrs, 'labels': args.labels}
    with Stage('train', out, inputs, json.loads(config.json())) as stage:
        graph = load_graph(args.edges, args.attrs, args.labels)
        topology = load_topology(topo_dir)
        if topology.num_nodes != graph.num_nodes:
            raise ConfigError(f'topology has {topology.num_nodes} nodes, graph has {graph.num_nodes}')
        check_params(topology, config.tau, config.max_graphlet_size, config.delta)
        splits = split_nodes(graph, config.split_ratios, config.seed, config.stratify)
        params, center, history = train(graph, topology, splits, config)
        stage.add(*save_checkpoint(os.path.join(out, 'checkpoint'), params, center, config,
                                   history.best_epoch, graph.num_features))
        history_to_csv(history, os.path.join(out, 'history.csv'))
        save_splits(splits, os.path.join(out, 'splits.json'))
        stage.add(os.path.join(out, 'history.csv'), os.path.join(out, 'splits.json'))
    return 0
