"""Independent brute-force oracles the tests check the package against.

Everything here is deliberately written the slow, obvious way (per-voxel
loops, min over all pairs, set algebra on coordinate sets) and shares no
code with the package.
"""

import math
import statistics

import numpy as np

_CROSS_OFFSETS = [
    (0, 0, 0),
    (-1, 0, 0), (1, 0, 0),
    (0, -1, 0), (0, 1, 0),
    (0, 0, -1), (0, 0, 1),
]
_FULL_OFFSETS = [
    (dz, dy, dx)
    for dz in (-1, 0, 1)
    for dy in (-1, 0, 1)
    for dx in (-1, 0, 1)
]


def confusion_counts(ref, pred):
    """TP/FP/FN/TN by visiting every voxel once."""
    tp = fp = fn = tn = 0
    for r, p in zip(np.asarray(ref).ravel().tolist(), np.asarray(pred).ravel().tolist()):
        if r and p:
            tp += 1
        elif r and not p:
            fn += 1
        elif p:
            fp += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def overlap_metrics(ref, pred):
    """All nine overlap metrics from set algebra on coordinate sets."""
    a = {tuple(ix) for ix in np.argwhere(np.asarray(ref, dtype=bool))}
    b = {tuple(ix) for ix in np.argwhere(np.asarray(pred, dtype=bool))}
    total = int(np.asarray(ref).size)
    inter = len(a & b)
    union = len(a | b)
    fn_ = len(a - b)
    fp_ = len(b - a)
    tn_ = total - union

    out = {}
    out["dice"] = 2 * inter / (len(a) + len(b)) if (len(a) + len(b)) else 1.0
    out["jaccard"] = inter / union if union else 1.0
    out["precision"] = (inter / len(b)) if len(b) else (1.0 if not a else 0.0)
    out["recall"] = (inter / len(a)) if len(a) else (1.0 if not b else 0.0)
    out["specificity"] = tn_ / (tn_ + fp_) if (tn_ + fp_) else 1.0
    out["accuracy"] = (inter + tn_) / total if total else 1.0
    out["fpr"] = fp_ / (fp_ + tn_) if (fp_ + tn_) else 0.0
    out["fnr"] = fn_ / (fn_ + inter) if (fn_ + inter) else 0.0
    denom = 2 * inter + fp_ + fn_
    out["vs"] = 1.0 - abs(fn_ - fp_) / denom if denom else 1.0
    return out


def erode(mask, fully_connected):
    """A voxel survives only if every structuring neighbour is inside the
    mask; out-of-bounds neighbours count as background."""
    mask = np.asarray(mask, dtype=bool)
    offsets = _FULL_OFFSETS if fully_connected else _CROSS_OFFSETS
    cells = mask.tolist()  # plain nested lists, fast scalar indexing
    out = np.zeros_like(mask)
    n0, n1, n2 = mask.shape
    for i in range(n0):
        for j in range(n1):
            for k in range(n2):
                if not cells[i][j][k]:
                    continue
                keep = True
                for dz, dy, dx in offsets:
                    z, y, x = i + dz, j + dy, k + dx
                    if not (0 <= z < n0 and 0 <= y < n1 and 0 <= x < n2):
                        keep = False
                        break
                    if not cells[z][y][x]:
                        keep = False
                        break
                out[i, j, k] = keep
    return out


def border(mask, fully_connected):
    mask = np.asarray(mask, dtype=bool)
    return mask & ~erode(mask, fully_connected)


def directed_distances(from_mask, to_mask, spacing):
    """One distance per from-voxel (argwhere order): the minimum over all
    to-voxels of the physical Euclidean distance."""
    src = np.argwhere(np.asarray(from_mask, dtype=bool)).astype(float)
    dst = np.argwhere(np.asarray(to_mask, dtype=bool)).astype(float)
    s0, s1, s2 = (float(s) for s in spacing)
    if src.size == 0:
        return np.zeros(0)
    d2 = ((src[:, None, 0] - dst[None, :, 0]) * s0) ** 2
    d2 += ((src[:, None, 1] - dst[None, :, 1]) * s1) ** 2
    d2 += ((src[:, None, 2] - dst[None, :, 2]) * s2) ** 2
    return np.sqrt(d2.min(axis=1))


def nearest_distance_map(seeds, spacing):
    """Distance from every voxel to the nearest seed, min over all seeds."""
    seeds = np.asarray(seeds, dtype=bool)
    out = np.empty(seeds.shape)
    pts = np.argwhere(seeds)
    s = [float(v) for v in spacing]
    for i in range(seeds.shape[0]):
        for j in range(seeds.shape[1]):
            for k in range(seeds.shape[2]):
                best = math.inf
                for z, y, x in pts:
                    d2 = ((i - z) * s[0]) ** 2 + ((j - y) * s[1]) ** 2 + ((k - x) * s[2]) ** 2
                    best = min(best, d2)
                out[i, j, k] = math.sqrt(best)
    return out


def percentile_linear(values, q):
    """q-th percentile, linear interpolation between order statistics."""
    xs = sorted(float(v) for v in values)
    if len(xs) == 1:
        return xs[0]
    rank = (len(xs) - 1) * q / 100.0
    lo = int(math.floor(rank))
    hi = min(lo + 1, len(xs) - 1)
    frac = rank - lo
    return xs[lo] + frac * (xs[hi] - xs[lo])


def distance_summary(ref_to_pred, pred_to_ref):
    """HD/HD95/MSD/MDSD/STDSD from the two directed multisets, using the
    standard library for the pooled statistics."""
    pooled = [float(v) for v in ref_to_pred] + [float(v) for v in pred_to_ref]
    return {
        "hd": max(max(ref_to_pred), max(pred_to_ref)),
        "hd95": max(percentile_linear(ref_to_pred, 95), percentile_linear(pred_to_ref, 95)),
        "msd": statistics.mean(pooled),
        "mdsd": statistics.median(pooled),
        "stdsd": statistics.pstdev(pooled),
    }
