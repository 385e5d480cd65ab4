"""Command-line front end.

Mirrors the library's write_metrics contract: compare one ground-truth
image (or folder) against one prediction, print a per-label table to
stdout and optionally append the rows to a CSV file.  Exit codes:
0 success, 1 evaluation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import MaskMetricsError
from .evaluator import EvaluationRequest, write_metrics

_METRIC_HELP = (
    ("dice", "Dice coefficient (F1): 2*TP / (2*TP + FP + FN)"),
    ("jaccard", "Jaccard index (IoU): TP / (TP + FP + FN)"),
    ("precision", "positive predictive value: TP / (TP + FP)"),
    ("recall", "sensitivity / true positive rate: TP / (TP + FN)"),
    ("specificity", "true negative rate: TN / (TN + FP)"),
    ("accuracy", "Rand index: (TP + TN) / all voxels"),
    ("fpr", "false positive rate: FP / (FP + TN)"),
    ("fnr", "false negative rate: FN / (FN + TP)"),
    ("vs", "volume similarity: 1 - |FN - FP| / (2*TP + FP + FN)"),
    ("hd", "Hausdorff distance (mm): max of the two directed maxima"),
    ("hd95", "robust Hausdorff (mm): max of the directed 95th percentiles"),
    ("msd", "mean surface distance (mm) over both directions pooled"),
    ("mdsd", "median surface distance (mm) over both directions pooled"),
    ("stdsd", "std of surface distances (mm) over both directions pooled"),
)


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _name_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _float3(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if len(values) != 3:
        raise argparse.ArgumentTypeError("spacing needs exactly 3 components: s0,s1,s2")
    return values


def build_parser() -> argparse.ArgumentParser:
    epilog = "metrics:\n" + "\n".join(f"  {name:<12} {text}" for name, text in _METRIC_HELP)
    parser = argparse.ArgumentParser(
        prog="maskmetrics",
        description="Compare segmentation label volumes and report "
        "overlap and surface-distance metrics per label.",
        epilog=epilog,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--gdth", required=True, metavar="PATH",
                        help="ground-truth image file or folder")
    parser.add_argument("--pred", required=True, metavar="PATH",
                        help="predicted image file or folder (folders are matched by filename)")
    parser.add_argument("--labels", required=True, type=_int_list, metavar="L1,L2,...",
                        help="labels to evaluate")
    parser.add_argument("--metrics", type=_name_list, metavar="m1,m2,...",
                        help="metric names to compute (default: all, see list below)")
    parser.add_argument("--csv", metavar="PATH",
                        help="append result rows to this CSV file")
    parser.add_argument("--spacing", type=_float3, metavar="s0,s1,s2",
                        help="override voxel spacing in mm, slowest axis first")
    parser.add_argument("--fully-connected", action=argparse.BooleanOptionalAction, default=True,
                        help="extract borders with the 26-neighbour element "
                        "(--no-fully-connected switches to the 6-neighbour cross)")
    parser.add_argument("--tptnfpfn", action="store_true",
                        help="also report TP/TN/FP/FN voxel counts")
    parser.add_argument("--verbose", action="store_true",
                        help="print per-pair progress lines to stderr")
    return parser


def _print_table(records, tptnfpfn: bool) -> None:
    if not records:
        return
    metric_names = list(records[0].values.keys())
    header = ["filename", "label", *metric_names]
    if tptnfpfn:
        header.extend(("tp", "tn", "fp", "fn"))
    rows = [header]
    for record in records:
        row = [record.filename, str(record.label)]
        row.extend(f"{record.values[name]:.4f}" for name in metric_names)
        if tptnfpfn:
            c = record.counts
            row.extend(str(v) for v in (c.tp, c.tn, c.fp, c.fn))
        rows.append(row)
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    for row in rows:
        print("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        request = EvaluationRequest(
            labels=args.labels,
            gdth_path=args.gdth,
            pred_path=args.pred,
            csv_path=args.csv,
            metrics=args.metrics,
            spacing=args.spacing,
            fully_connected=args.fully_connected,
            tptnfpfn=args.tptnfpfn,
            verbose=args.verbose,
        )
        records = write_metrics(request)
    except (MaskMetricsError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _print_table(records, args.tptnfpfn)
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
