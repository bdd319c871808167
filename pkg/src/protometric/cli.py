"""Command-line pipeline: extract -> graph -> train -> predict / explain.

Exit codes: 0 success, 1 usage/configuration error, 2 data error,
3 numerical error.
"""

import argparse
import logging
import sys

from . import io
from .classifier import explain, format_report, prediction_rows
from .energy import Hyperparams
from .errors import ConfigError, DataError, NumericalError
from .semgraph import ClassRegistry, build_adjacency
from .trainer import TrainConfig, train
from .wavelet import BOUNDARY_MODES, WaveletConfig, available_families

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _wavelet_flags(p):
    p.add_argument("--wavelet", default="db4", choices=available_families())
    p.add_argument("--levels", type=int, default=5)
    p.add_argument("--coeffs-per-band", type=int, default=10)
    p.add_argument("--boundary", default="periodic", choices=BOUNDARY_MODES)


def _wavelet_config(args, normalize=True):
    return WaveletConfig(
        family=args.wavelet,
        levels=args.levels,
        coeffs_per_band=args.coeffs_per_band,
        boundary=args.boundary,
        normalize=normalize,
    )


def build_parser():
    parser = _Parser(prog="protometric", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", help="WAV manifest -> feature CSV")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-normalize", action="store_true",
                   help="skip peak-amplitude normalization")
    _wavelet_flags(p)

    p = sub.add_parser("graph", help="class embeddings -> adjacency CSV")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--k-neighbors", type=int, default=3)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="features (+ adjacency) -> model file")
    p.add_argument("--features", required=True)
    p.add_argument("--adjacency")
    p.add_argument("--model", required=True)
    p.add_argument("--trace", help="energy-trace CSV output")
    p.add_argument("--lambda1", type=float, default=0.1)
    p.add_argument("--lambda2", type=float, default=0.01)
    p.add_argument("--margin", type=float, default=1.0)
    p.add_argument("--t-max", type=int, default=100)
    p.add_argument("--epsilon", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0,
                   help="reserved; training is deterministic")
    _wavelet_flags(p)

    p = sub.add_parser("predict", help="model + features -> prediction CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", help="output CSV (default: stdout)")

    p = sub.add_parser("explain", help="model -> weight and distance report")
    p.add_argument("--model", required=True)
    p.add_argument("--top", type=int)
    p.add_argument("--out")
    return parser


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_extract(args):
    cfg = _wavelet_config(args, normalize=not args.no_normalize)
    ids, names, X = io.extract_manifest(args.manifest, cfg)
    io.write_features(args.out, ids, names, X)


def cmd_graph(args):
    table = io.read_embeddings(args.embeddings)
    registry = ClassRegistry.from_names(table)
    graph = build_adjacency(registry, table, args.k_neighbors)
    io.write_adjacency(args.out, graph, registry)


def cmd_train(args):
    hp = Hyperparams(args.lambda1, args.lambda2, args.margin)
    tc = TrainConfig(t_max=args.t_max, epsilon=args.epsilon)
    cfg = _wavelet_config(args)
    ids, names, X = io.read_features(args.features)
    registry, data = io.dataset_from_features(ids, names, X)
    if cfg.dim != data.dim:
        raise DataError(
            f"features have dimension {data.dim} but --levels/--coeffs-per-band "
            f"give (L+1)*k = {cfg.dim}"
        )
    graph = io.read_adjacency(args.adjacency, registry) if args.adjacency else None
    progress = sys.stderr if args.verbose else None
    try:
        model = train(data, registry, graph, hp, tc, wavelet_config=cfg, progress=progress)
    except NumericalError as exc:
        if args.trace:
            io.write_trace(args.trace, exc.trace)
        raise
    io.save_model(model, args.model)
    if args.trace:
        io.write_trace(args.trace, model.energy_trace)


def cmd_predict(args):
    model = io.load_model(args.model)
    ids, _, X = io.read_features(args.features)
    if X.shape[1] != model.dim:
        raise DataError(
            f"{args.features}: feature dimension {X.shape[1]} does not match "
            f"the model's expected d={model.dim}"
        )
    io.write_predictions(args.out or sys.stdout, prediction_rows(X, model, ids))


def cmd_explain(args):
    model = io.load_model(args.model)
    _emit(format_report(explain(model), top=args.top), args.out)


COMMANDS = {
    "extract": cmd_extract,
    "graph": cmd_graph,
    "train": cmd_train,
    "predict": cmd_predict,
    "explain": cmd_explain,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"protometric {args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"protometric {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"protometric {args.command}: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
