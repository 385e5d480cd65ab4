"""Keyword-argument front end for the maskmetrics core.

One function, ``write_metrics``, taking either file/folder paths or
in-memory 3D integer arrays, returning a list of plain dicts (one per
file and label) and optionally appending the same rows to a CSV file.
Numeric results are identical to what the maskmetrics CLI writes for
the same inputs.
"""

from __future__ import annotations

import numpy as np

from maskmetrics import EvaluationRequest, LabelVolume, __version__ as _core_version
from maskmetrics import write_metrics as _core_write_metrics

__version__ = _core_version

__all__ = ["write_metrics", "__version__"]

_DEFAULT_SPACING = (1.0, 1.0, 1.0)


def _as_volumes(images, spacing, argname):
    """Accept one array or a sequence of arrays, in canonical axis order."""
    if isinstance(images, np.ndarray) and images.ndim == 3:
        images = [images]
    try:
        return [LabelVolume.from_array(np.asarray(img), spacing) for img in images]
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{argname} must be a 3D integer array or a sequence of them: {exc}") from exc


def write_metrics(labels, gdth_path=None, pred_path=None, csv_file=None,
                  gdth_img=None, pred_img=None, metrics=None, verbose=False,
                  spacing=None, fully_connected=True, TPTNFPFN=False):
    """Compute segmentation metrics for one pair or a batch of pairs.

    Parameters
    ----------
    labels : sequence of int
        Labels to evaluate (include 0 to score the background too).
    gdth_path, pred_path : str or Path, optional
        Ground-truth and prediction, each a file or a directory; two
        directories are matched by identical filename.
    csv_file : str or Path, optional
        Appends one row per (file, label) to this CSV file.
    gdth_img, pred_img : array or sequence of arrays, optional
        In-memory alternative to the paths: 3D integer arrays indexed
        slowest axis first.  Paths and arrays are mutually exclusive.
    metrics : str or sequence of str, optional
        Metric names (dice, jaccard, precision, recall, specificity,
        accuracy, fpr, fnr, vs, hd, hd95, msd, mdsd, stdsd); a single
        name may be passed bare.  Default: all of them.
    verbose : bool
        Print one progress line per pair to stderr.
    spacing : sequence of 3 floats, optional
        Voxel spacing in mm, slowest axis first.  Overrides header
        spacing in path mode; in image mode it is the grid spacing
        (default 1.0 isotropic).
    fully_connected : bool
        Border extraction with the 26-neighbour element (True) or the
        6-neighbour cross (False).
    TPTNFPFN : bool
        Also include the tp/tn/fp/fn voxel counts in every dict.

    Returns
    -------
    list of dict
        One dict per (file, label) with keys ``filename``, ``label``
        and the requested metric names.
    """
    paths_given = gdth_path is not None or pred_path is not None
    images_given = gdth_img is not None or pred_img is not None
    if paths_given and images_given:
        raise ValueError("pass gdth_path/pred_path or gdth_img/pred_img, not both")
    if not paths_given and not images_given:
        raise ValueError("no input images: pass paths or arrays")

    if images_given:
        grid_spacing = _DEFAULT_SPACING if spacing is None else spacing
        request = EvaluationRequest(
            labels=list(labels) if not isinstance(labels, int) else [labels],
            gdth_volumes=_as_volumes(gdth_img, grid_spacing, "gdth_img"),
            pred_volumes=_as_volumes(pred_img, grid_spacing, "pred_img"),
            csv_path=csv_file,
            metrics=metrics,
            fully_connected=bool(fully_connected),
            tptnfpfn=bool(TPTNFPFN),
            verbose=bool(verbose),
        )
    else:
        request = EvaluationRequest(
            labels=list(labels) if not isinstance(labels, int) else [labels],
            gdth_path=gdth_path,
            pred_path=pred_path,
            csv_path=csv_file,
            metrics=metrics,
            spacing=spacing,
            fully_connected=bool(fully_connected),
            tptnfpfn=bool(TPTNFPFN),
            verbose=bool(verbose),
        )
    return [record.as_dict() for record in _core_write_metrics(request)]
