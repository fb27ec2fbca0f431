import os

from api.other import Stage, out_dir, read_scores, require, write_json
from graph import load_splits
from graph.graphio import read_labels
from metric import evaluate_scores


def register(subparsers, parents):
    p = subparsers.add_parser('eval', parents=parents, help='AUROC / AUPR of a scores CSV against labels')
    p.add_argument('--scores', default=None, help='score output (default <out-dir>/scores.csv)')
    p.add_argument('--labels', required=True, help='0/1 anomaly label per line')
    p.add_argument('--splits', default=None, help='splits.json written by train')
    p.add_argument('--part', choices=('train', 'val', 'test'), default='test')
    p.set_defaults(handler=run)


def run(args) -> int:
    out = out_dir(args)
    scores_path = args.scores or os.path.join(out, 'scores.csv')
    inputs = {'scores': require(scores_path, 'score'), 'labels': args.labels, 'splits': args.splits}
    with Stage('eval', out, inputs, {'part': args.part if args.splits else 'all'}) as stage:
        scores = read_scores(scores_path)
        labels = read_labels(args.labels, len(scores))
        ids = load_splits(args.splits).part(args.part) if args.splits else None
        report = evaluate_scores(scores, labels, ids)
        stage.add(write_json(report.dict(), os.path.join(out, 'metrics.json')))
        print(report.json())
    return 0
