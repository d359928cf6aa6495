from app.api.common import CommandError, add_output_option, domain_errors, emit_csv, parse_fn, precision
from app.services import arith


def register(subparsers):
    parser = subparsers.add_parser("sieve", help="tabulate an arithmetic function on 1..N")
    parser.add_argument("--fn", required=True, help="function name, e.g. mobius, vonmangoldt, tau")
    parser.add_argument("--limit", type=int, required=True, help="N")
    parser.add_argument("--prefix-sums", action="store_true", help="add the running sum column")
    parser.add_argument("--prec", type=int, default=None, help="bits for log p in Lambda tables")
    add_output_option(parser, "CSV path (default: stdout)")
    parser.set_defaults(handler=cmd_sieve)


def cmd_sieve(args):
    """CSV n,value[,prefix]; Lambda tables as n,value,p,k"""
    fn_id = parse_fn(args.fn)
    if args.limit < 1:
        raise CommandError(2, f"--limit must be positive, got {args.limit}")
    pc = precision(args)
    with domain_errors():
        table = arith.sieve(fn_id, args.limit, prefix_sums=args.prefix_sums)
        emit_csv(arith.table_rows(table, pc), args.out)
