"""Command-line surface: depth tables and classification experiments.

Exit codes: 0 success, 2 I/O or format problems, 3 rank-deficient samples
(remediable with --tensor-pca), 4 infeasible experiment protocols.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, report, tensor_pca
from .classify import ExperimentProtocol, run_experiment
from .datasets import DatasetManifest, load_labeled, load_queries, load_sample
from .errors import (
    DataFormatError,
    DegenerateSampleError,
    DimensionError,
    ProtocolError,
    RankDeficiencyError,
)
from .locscale import LocationScale
from .tensor import DenseTensor, TensorSample
from .tensor_depth import TpdConfig, tpd_outlyingness
from .vector_depth import (
    SearchBudget,
    VectorSample,
    approx_outlyingness_medmad,
    depth_from_outlyingness,
    principal_basis,
    rayleigh_outlyingness,
)


def _parse_shape(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(part) for part in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"shape must look like 2x2 or 4x8x3, got {text!r}"
        )
    if not dims or min(dims) < 1:
        raise argparse.ArgumentTypeError(f"shape dims must be positive: {text!r}")
    return dims


def _add_depth_options(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--depth",
        choices=("pd", "rpd", "tpd"),
        default="rpd",
        help="vector depth (pd), exact mean/std vector depth (rpd), or "
        "tensor depth (tpd)",
    )
    parser.add_argument(
        "--location-scale",
        choices=("meanstd", "medmad"),
        default="meanstd",
        help="location/scale pair standardising projections",
    )
    parser.add_argument(
        "--tensor-pca",
        action="store_true",
        help="remove the sample null space before computing depths",
    )
    parser.add_argument("--restarts", type=int, default=1, metavar="R")
    parser.add_argument("--tol", type=float, default=1e-9)
    parser.add_argument("--max-iter", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--shape",
        type=_parse_shape,
        default=None,
        metavar="d1xd2[xd3...]",
        help="reinterpret each record under these dims (e.g. 2x2)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tpdepth",
        description="Projection depth for vectors, matrices and tensors.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_depth = sub.add_parser(
        "depth", help="write a depth table for query points against a dataset"
    )
    p_depth.add_argument("--manifest", required=True, help="dataset manifest JSON")
    p_depth.add_argument(
        "--queries",
        default=None,
        help="CSV of query records (defaults to the dataset itself)",
    )
    p_depth.add_argument("--out", default=None, help="output CSV (default stdout)")
    _add_depth_options(p_depth)

    p_exp = sub.add_parser(
        "experiment", help="run a randomised classification experiment"
    )
    p_exp.add_argument("--manifest", required=True, help="dataset manifest JSON")
    p_exp.add_argument("--protocol", required=True, help="protocol JSON")
    p_exp.add_argument(
        "--out-dir",
        default="tpdepth-report",
        help="directory for report.json / report.csv / report.png",
    )
    p_exp.add_argument(
        "--no-figure", action="store_true", help="skip the summary figure"
    )
    return parser


def _note(message: str):
    print(message, file=sys.stderr)


def _depth_rows_vector(sample, queries, args):
    kind = (
        LocationScale.MEAN_STD
        if args.depth == "rpd"
        else LocationScale.parse(args.location_scale)
    )
    points = sample.vectorized()
    qvecs = queries.vectorized()
    basis = None
    if args.tensor_pca:
        basis = principal_basis(VectorSample(points))
        _note(
            f"PCA retained {basis.shape[1]} of {basis.shape[0]} dimensions"
        )
        points = points @ basis
        qvecs = qvecs @ basis
    vs = VectorSample(points)
    rng = np.random.default_rng(args.seed)
    rows = []
    for i, q in enumerate(qvecs):
        if kind is LocationScale.MEAN_STD:
            res = rayleigh_outlyingness(q, vs)
        else:
            res = approx_outlyingness_medmad(q, vs, SearchBudget(), rng=rng)
        rows.append(
            (i, res.value, depth_from_outlyingness(res.value), 1, True,
             np.asarray(res.direction))
        )
    return rows


def _depth_rows_tensor(sample, queries, args):
    if args.shape is not None:
        sample = TensorSample.from_array(
            sample.stack.reshape((len(sample),) + args.shape)
        )
        queries = TensorSample.from_array(
            queries.stack.reshape((len(queries),) + args.shape)
        )
    if sample.order < 2:
        raise DimensionError(
            "tpd needs order >= 2 records; pass --shape or use --depth rpd"
        )
    if args.tensor_pca:
        model, sample = tensor_pca.fit_transform(sample)
        _note(
            "tensor PCA ranks: "
            + "x".join(str(r) for r in model.ranks)
            + " (from " + "x".join(str(d) for d in model.dims) + ")"
        )
        queries = TensorSample(
            [tensor_pca.transform(model, q) for q in queries]
        )
    cfg = TpdConfig(
        kind=LocationScale.parse(args.location_scale),
        restarts=args.restarts,
        tol=args.tol,
        max_iter=args.max_iter,
        seed=args.seed,
    )
    rng = np.random.default_rng(args.seed)
    rows = []
    for i, q in enumerate(queries):
        res = tpd_outlyingness(q, sample, cfg, rng)
        rows.append(
            (i, res.outlyingness, res.depth, res.iterations, res.converged,
             np.concatenate(res.directions))
        )
    return rows


def _write_depth_table(rows, out):
    lines = ["id,outlyingness,depth,iterations,converged,directions"]
    for i, value, depth, iters, converged, direction in rows:
        dir_text = " ".join(report.format_float(c) for c in direction)
        lines.append(
            f"{i},{report.format_float(value)},{report.format_float(depth)},"
            f"{iters},{str(bool(converged)).lower()},{dir_text}"
        )
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_depth(args) -> int:
    manifest = DatasetManifest.from_json_file(args.manifest)
    sample = load_sample(manifest, shape_override=args.shape)
    if args.queries is None:
        queries = sample
    else:
        queries = load_queries(args.queries, manifest, shape_override=args.shape)
    if queries.shape != sample.shape:
        raise DimensionError(
            f"query shape {queries.shape} does not match dataset shape "
            f"{sample.shape}"
        )
    if args.depth == "tpd":
        rows = _depth_rows_tensor(sample, queries, args)
    else:
        rows = _depth_rows_vector(sample, queries, args)
    _write_depth_table(rows, args.out)
    return 0


def cmd_experiment(args) -> int:
    manifest = DatasetManifest.from_json_file(args.manifest)
    try:
        protocol_doc = Path(args.protocol).read_text()
    except OSError as err:
        raise DataFormatError(f"{args.protocol}: {err}") from err
    import json

    try:
        protocol = ExperimentProtocol.from_dict(json.loads(protocol_doc))
    except json.JSONDecodeError as err:
        raise DataFormatError(f"{args.protocol}: not valid JSON ({err})") from err
    dataset = load_labeled(manifest)
    protocol.validate(dataset)

    values_meta = {
        "manifest": {
            "format": manifest.format,
            "path": str(manifest.path),
            "shape": None if manifest.shape is None else list(manifest.shape),
            "label_column": manifest.label_column,
        },
        "class_labels": list(dataset.labels),
    }
    rep = run_experiment(dataset, protocol, extra_metadata=values_meta)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = report.write_json(rep, out_dir / "report.json")
    csv_path = report.write_csv(rep, out_dir / "report.csv")
    _note(f"wrote {json_path}")
    _note(f"wrote {csv_path}")
    if not args.no_figure:
        fig_path = report.write_figure(rep, out_dir / "report.png")
        _note(f"wrote {fig_path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "depth":
            return cmd_depth(args)
        return cmd_experiment(args)
    except RankDeficiencyError as err:
        _note(f"error: {err}")
        if not getattr(args, "tensor_pca", False):
            _note("hint: run with --tensor-pca to drop the sample's null space")
        return 3
    except ProtocolError as err:
        _note(f"error: {err}")
        return 4
    except (DataFormatError, DimensionError, DegenerateSampleError) as err:
        _note(f"error: {err}")
        return 2
    except OSError as err:
        _note(f"error: {err}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
