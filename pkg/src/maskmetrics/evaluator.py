"""Batch evaluation: resolve inputs, iterate labels, dispatch metrics.

``write_metrics`` is the one entry point: it accepts a validated
EvaluationRequest, pairs up the inputs (two files, two folders matched
by filename, or in-memory volumes), evaluates every requested metric
per label, optionally appends the rows to a CSV file, and returns the
records in pair-then-label order.
"""

from __future__ import annotations

import sys
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

from . import overlap, surface
from .errors import (
    DimsMismatch,
    EmptySurface,
    InvalidSpacing,
    MaskMetricsError,
    MixedMode,
    NoMatches,
    SpacingMismatch,
    UnknownMetric,
)
from .image_io import LabelVolume, has_supported_suffix, load_volume
from .overlap import BinaryMaskPair, ConfusionCounts, binarize, confusion
from .surface import SurfaceDistanceSet, surface_distance_set

OVERLAP_METRICS = {
    "dice": overlap.dice,
    "jaccard": overlap.jaccard,
    "precision": overlap.precision,
    "recall": overlap.recall,
    "specificity": overlap.specificity,
    "accuracy": overlap.accuracy,
    "fpr": overlap.fpr,
    "fnr": overlap.fnr,
    "vs": overlap.volume_similarity,
}

DISTANCE_METRICS = {
    "hd": surface.hausdorff,
    "hd95": surface.hausdorff95,
    "msd": surface.mean_surface_distance,
    "mdsd": surface.median_surface_distance,
    "stdsd": surface.std_surface_distance,
}

# Canonical metric order; also the default selection.
METRIC_NAMES = tuple(OVERLAP_METRICS) + tuple(DISTANCE_METRICS)

# gdth/pred header spacings may differ by float noise, not more.
SPACING_TOLERANCE = 1e-6


@dataclass
class EvaluationRequest:
    """Resolved configuration for one evaluation run.

    Exactly one input mode must be populated: ``gdth_path``/``pred_path``
    (each a file or a directory) or ``gdth_volumes``/``pred_volumes``
    (LabelVolume instances, paired by position).  ``metrics`` may be a
    list of names, a single name, or None for the full set; ``spacing``
    overrides header spacing and is in canonical axis order.
    """

    labels: list[int]
    gdth_path: str | Path | None = None
    pred_path: str | Path | None = None
    gdth_volumes: list[LabelVolume] | LabelVolume | None = None
    pred_volumes: list[LabelVolume] | LabelVolume | None = None
    csv_path: str | Path | None = None
    metrics: list[str] | str | None = None
    spacing: tuple[float, float, float] | None = None
    fully_connected: bool = True
    tptnfpfn: bool = False
    verbose: bool = False

    def __post_init__(self):
        labels = [int(v) for v in self.labels]
        if not labels:
            raise ValueError("labels must not be empty")
        if any(v < 0 for v in labels):
            raise ValueError(f"labels must be non-negative, got {labels}")
        if len(set(labels)) != len(labels):
            raise ValueError(f"labels contain duplicates: {labels}")
        self.labels = labels

        if self.metrics is None:
            names = list(METRIC_NAMES)
        elif isinstance(self.metrics, str):
            names = [self.metrics]
        else:
            names = [str(m) for m in self.metrics]
        seen = []
        for name in names:
            if name not in METRIC_NAMES:
                raise UnknownMetric(f"unknown metric: {name}")
            if name not in seen:
                seen.append(name)
        self.metrics = seen

        path_mode = self.gdth_path is not None or self.pred_path is not None
        volume_mode = self.gdth_volumes is not None or self.pred_volumes is not None
        if path_mode and volume_mode:
            raise ValueError("pass either paths or in-memory volumes, not both")
        if not path_mode and not volume_mode:
            raise ValueError("no inputs: pass gdth/pred paths or volumes")
        if path_mode and (self.gdth_path is None or self.pred_path is None):
            raise ValueError("path mode needs both gdth_path and pred_path")
        if volume_mode:
            gdth = self._as_volume_list(self.gdth_volumes, "gdth_volumes")
            pred = self._as_volume_list(self.pred_volumes, "pred_volumes")
            if len(gdth) != len(pred):
                raise ValueError(
                    f"volume counts differ: {len(gdth)} gdth vs {len(pred)} pred"
                )
            self.gdth_volumes = gdth
            self.pred_volumes = pred

        if self.spacing is not None:
            spacing = tuple(float(s) for s in self.spacing)
            if len(spacing) != 3 or any(not s > 0 for s in spacing):
                raise InvalidSpacing(f"spacing override must be 3 positive reals, got {self.spacing!r}")
            self.spacing = spacing

        if self.csv_path is not None:
            self.csv_path = Path(self.csv_path)

    @staticmethod
    def _as_volume_list(value, argname) -> list[LabelVolume]:
        if isinstance(value, LabelVolume):
            return [value]
        if value is None or any(not isinstance(v, LabelVolume) for v in value):
            raise ValueError(f"{argname} must be LabelVolume instances")
        return list(value)

    @property
    def volume_mode(self) -> bool:
        return self.gdth_volumes is not None

    @property
    def wants_distance(self) -> bool:
        return any(m in DISTANCE_METRICS for m in self.metrics)


@dataclass
class MetricRecord:
    """Metric values for one (file, label); one CSV row."""

    filename: str
    label: int
    values: dict[str, float]
    counts: ConfusionCounts | None = None

    def as_dict(self) -> dict:
        row = {"filename": self.filename, "label": self.label, **self.values}
        if self.counts is not None:
            row.update(tp=self.counts.tp, tn=self.counts.tn, fp=self.counts.fp, fn=self.counts.fn)
        return row


@dataclass(frozen=True)
class ResolvedPair:
    name: str
    gdth: Path | LabelVolume
    pred: Path | LabelVolume


def resolve_pairs(request: EvaluationRequest) -> list[ResolvedPair]:
    """Turn the request inputs into an ordered list of gdth/pred pairs.

    Two directories are matched by identical filename among supported
    suffixes and sorted lexicographically; unmatched files are reported
    on stderr when the request is verbose.
    """
    if request.volume_mode:
        count = len(request.gdth_volumes)
        names = ["<memory>"] if count == 1 else [f"<memory:{i}>" for i in range(count)]
        return [
            ResolvedPair(name, g, p)
            for name, g, p in zip(names, request.gdth_volumes, request.pred_volumes)
        ]

    gdth = Path(request.gdth_path)
    pred = Path(request.pred_path)
    for p in (gdth, pred):
        if not p.exists():
            raise FileNotFoundError(f"no such file or directory: {p}")
    if gdth.is_file() and pred.is_file():
        return [ResolvedPair(pred.name, gdth, pred)]
    if gdth.is_dir() and pred.is_dir():
        gdth_names = {e.name for e in gdth.iterdir() if e.is_file() and has_supported_suffix(e.name)}
        pred_names = {e.name for e in pred.iterdir() if e.is_file() and has_supported_suffix(e.name)}
        if request.verbose:
            for name in sorted(gdth_names ^ pred_names):
                side = "gdth" if name in gdth_names else "pred"
                print(f"warning: unpaired file ({side} only): {name}", file=sys.stderr)
        common = sorted(gdth_names & pred_names)
        if not common:
            raise NoMatches(f"no shared image filenames between {gdth} and {pred}")
        return [ResolvedPair(name, gdth / name, pred / name) for name in common]
    raise MixedMode("gdth and pred must both be files or both be directories")


def evaluate_pair(
    gdth: LabelVolume,
    pred: LabelVolume,
    request: EvaluationRequest,
    filename: str = "<memory>",
) -> list[MetricRecord]:
    """Compute every requested metric for every requested label.

    Per label the confusion matrix is computed once and, when any
    distance metric is requested, one SurfaceDistanceSet serves all of
    them.  A label whose surface is empty on either side degrades to
    NaN distance cells with a warning instead of failing the pair.
    """
    if request.spacing is not None:
        gdth = replace(gdth, spacing=request.spacing)
        pred = replace(pred, spacing=request.spacing)
    if gdth.dims != pred.dims:
        raise DimsMismatch(f"volume dims differ: {gdth.dims} vs {pred.dims}")
    if any(abs(a - b) > SPACING_TOLERANCE for a, b in zip(gdth.spacing, pred.spacing)):
        raise SpacingMismatch(
            f"volume spacings differ: {gdth.spacing} vs {pred.spacing}"
        )

    records = []
    for label in request.labels:
        ref = binarize(gdth, label)
        prd = binarize(pred, label)
        counts = confusion(BinaryMaskPair(ref, prd))

        distances: SurfaceDistanceSet | None = None
        if request.wants_distance:
            try:
                distances = surface_distance_set(
                    ref, prd, gdth.spacing, request.fully_connected
                )
            except EmptySurface as exc:
                warnings.warn(
                    f"{filename}, label {label}: {exc}; distance metrics recorded as nan",
                    RuntimeWarning,
                    stacklevel=2,
                )

        values: dict[str, float] = {}
        for name in request.metrics:
            if name in OVERLAP_METRICS:
                values[name] = float(OVERLAP_METRICS[name](counts))
            elif distances is not None:
                values[name] = float(DISTANCE_METRICS[name](distances))
            else:
                values[name] = float("nan")
        records.append(
            MetricRecord(
                filename=filename,
                label=label,
                values=values,
                counts=counts if request.tptnfpfn else None,
            )
        )
    return records


def write_metrics(request: EvaluationRequest) -> list[MetricRecord]:
    """Evaluate all pairs of the request; optionally append rows to CSV.

    Returns the records in pair-then-label order.  A broken pair aborts
    the whole run (no partial CSV is written) with the pair named in the
    error.  Verbose mode prints one progress line per pair to stderr.
    """
    pairs = resolve_pairs(request)
    records: list[MetricRecord] = []
    for index, pair in enumerate(pairs):
        if request.verbose:
            print(f"[{index + 1}/{len(pairs)}] {pair.name}", file=sys.stderr)
        try:
            gdth = pair.gdth if isinstance(pair.gdth, LabelVolume) else load_volume(pair.gdth, request.spacing)
            pred = pair.pred if isinstance(pair.pred, LabelVolume) else load_volume(pair.pred, request.spacing)
            records.extend(evaluate_pair(gdth, pred, request, filename=pair.name))
        except MaskMetricsError as exc:
            exc.args = (f"pair '{pair.name}': {exc}",)
            raise
    if request.csv_path is not None:
        from .report import write_csv

        write_csv(records, request.csv_path, append=True)
    return records
