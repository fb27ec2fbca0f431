from config.change import setc, show


def register(subparsers, parents):
    p = subparsers.add_parser('config', parents=parents, help='show or edit config.yaml defaults')
    p.add_argument('key', nargs='?', default='', help='dotted key, e.g. train.hidden_dim')
    p.add_argument('values', nargs='*', help='new value(s); omit to show')
    p.set_defaults(handler=run)


def run(args) -> int:
    if args.values:
        setc(args.key, *args.values)
    else:
        show(args.key)
    return 0
