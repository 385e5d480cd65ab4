"""Readers for MetaImage (.mhd/.mha) and NIfTI-1 (.nii/.nii.gz) label volumes.

Everything downstream of this module works in one canonical convention:
axis 0 is the slowest-varying axis in memory and ``spacing[i]`` is the
physical voxel size in millimetres along axis ``i``.  Both file formats
list sizes and spacings fastest-axis-first, so header triples are
reversed here and never touched again.

2D images are promoted to depth-1 3D volumes with spacing 1.0 on the
degenerate axis.  Float-typed files are accepted when every voxel is
within 1e-6 of an integer; anything else is rejected as not a label
image.
"""

from __future__ import annotations

import gzip
import struct
import zlib
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    DataSizeMismatch,
    InvalidSpacing,
    MalformedHeader,
    NonIntegerLabels,
    UnsupportedDatatype,
    UnsupportedFormat,
)

SUPPORTED_SUFFIXES = (".mhd", ".mha", ".nii", ".nii.gz")

# Maximum |value - round(value)| for a float voxel to count as a label.
INTEGRAL_TOLERANCE = 1e-6

_METAIMAGE_TYPES = {
    "MET_CHAR": np.int8,
    "MET_UCHAR": np.uint8,
    "MET_SHORT": np.int16,
    "MET_USHORT": np.uint16,
    "MET_INT": np.int32,
    "MET_UINT": np.uint32,
    "MET_FLOAT": np.float32,
    "MET_DOUBLE": np.float64,
}

_NIFTI_TYPES = {
    2: np.uint8,
    4: np.int16,
    8: np.int32,
    16: np.float32,
    64: np.float64,
    256: np.int8,
    512: np.uint16,
    768: np.uint32,
}

_NIFTI_MAGICS = (b"n+1\x00", b"ni1\x00")
_GZIP_MAGIC = b"\x1f\x8b"


class ImageFormat(Enum):
    METAIMAGE = "metaimage"
    NIFTI = "nifti"


def has_supported_suffix(name) -> bool:
    return str(name).lower().endswith(SUPPORTED_SUFFIXES)


def detect_format(path) -> ImageFormat:
    """Map a file path to its image format by suffix.

    Content magic is checked later, at load time.  Raises
    UnsupportedFormat for anything outside ``SUPPORTED_SUFFIXES``.
    """
    name = str(path).lower()
    if name.endswith((".mhd", ".mha")):
        return ImageFormat.METAIMAGE
    if name.endswith((".nii", ".nii.gz")):
        return ImageFormat.NIFTI
    raise UnsupportedFormat(
        f"unsupported image format: {path!s} (supported: {', '.join(SUPPORTED_SUFFIXES)})"
    )


def _validated_spacing(spacing) -> tuple[float, float, float]:
    try:
        values = tuple(float(s) for s in spacing)
    except (TypeError, ValueError) as exc:
        raise InvalidSpacing(f"spacing must be three numbers, got {spacing!r}") from exc
    if len(values) != 3:
        raise InvalidSpacing(f"spacing must have three components, got {spacing!r}")
    if not all(np.isfinite(s) and s > 0 for s in values):
        raise InvalidSpacing(f"spacing components must be positive and finite, got {values}")
    return values


@dataclass(frozen=True)
class LabelVolume:
    """A 3D grid of integer labels plus physical voxel spacing.

    ``voxels`` is indexed slowest axis first and is frozen read-only at
    construction, so instances can be shared across threads.
    """

    voxels: np.ndarray
    spacing: tuple[float, float, float]

    def __post_init__(self):
        if not isinstance(self.voxels, np.ndarray) or self.voxels.ndim != 3:
            raise ValueError("voxels must be a 3D array")
        if any(n <= 0 for n in self.voxels.shape):
            raise ValueError(f"volume dims must be positive, got {self.voxels.shape}")
        if self.voxels.dtype.kind not in "iu":
            raise NonIntegerLabels(f"voxels must be integer-typed, got {self.voxels.dtype}")
        if self.voxels.dtype.kind == "i" and int(self.voxels.min()) < 0:
            raise NonIntegerLabels("label values must be non-negative")
        object.__setattr__(self, "spacing", _validated_spacing(self.spacing))
        self.voxels.setflags(write=False)

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.voxels.shape

    @classmethod
    def from_array(cls, array, spacing) -> "LabelVolume":
        """Build a volume from any 3D array of labels.

        Float and bool arrays are coerced like file payloads; integer
        arrays are copied so later caller-side writes cannot leak in.
        """
        arr = np.asarray(array)
        if arr.ndim != 3:
            raise ValueError(f"expected a 3D array, got {arr.ndim}D")
        if arr.dtype.kind == "b":
            arr = arr.astype(np.uint8)
        elif arr.dtype.kind == "f":
            arr = _labels_from_float(arr)
        elif arr.dtype.kind in "iu":
            arr = np.array(arr, copy=True)
        else:
            raise NonIntegerLabels(f"cannot interpret dtype {arr.dtype} as labels")
        return cls(voxels=arr, spacing=spacing)


@dataclass(frozen=True)
class VolumeHeader:
    """Parsed geometry of an image file, already in canonical axis order."""

    dims: tuple[int, int, int]
    spacing: tuple[float, float, float]
    dtype: np.dtype            # scalar element type, native byte order
    byte_order: str            # "<" little-endian, ">" big-endian payload
    data_offset: int | None    # payload offset inside the same file
    data_file: str | None      # sibling payload file (.mhd) or None
    compressed: bool


def _labels_from_float(arr: np.ndarray) -> np.ndarray:
    rounded = np.rint(arr)
    if not np.all(np.isfinite(arr)):
        raise NonIntegerLabels("float voxels contain non-finite values")
    if float(np.max(np.abs(arr - rounded), initial=0.0)) > INTEGRAL_TOLERANCE:
        raise NonIntegerLabels(
            f"float voxels deviate from integers by more than {INTEGRAL_TOLERANCE}"
        )
    return rounded.astype(np.int64)


def _to_native(arr: np.ndarray) -> np.ndarray:
    if arr.dtype.byteorder in ("=", "|") or arr.dtype.byteorder == _native_order():
        return arr
    return arr.astype(arr.dtype.newbyteorder("="))


def _native_order() -> str:
    return "<" if np.little_endian else ">"


def _canonicalize(flat: np.ndarray, dims_fastest_first, spacing_fastest_first):
    """Reshape an x-fastest payload into (slowest..fastest) order.

    The flat payload varies fastest along the first header axis, which
    is exactly C order for the reversed shape, so no transpose is
    needed; only the dims/spacing triples are flipped.
    """
    dims = tuple(int(n) for n in reversed(dims_fastest_first))
    spacing = tuple(float(s) for s in reversed(spacing_fastest_first))
    if len(dims) == 2:
        dims = (1,) + dims
        spacing = (1.0,) + spacing
    arr = flat.reshape(dims)
    return arr, spacing


def _finish_volume(arr: np.ndarray, spacing) -> LabelVolume:
    arr = _to_native(arr)
    if arr.dtype.kind == "f":
        arr = _labels_from_float(arr)
    return LabelVolume(voxels=arr, spacing=spacing)


# ---------------------------------------------------------------------------
# MetaImage
# ---------------------------------------------------------------------------

def _parse_bool(value: str) -> bool:
    return value.strip().lower() == "true"


def _split_header_lines(raw: bytes, path: Path):
    """Yield (key, value) pairs until ElementDataFile, tracking the offset.

    Returns the parsed fields and the byte offset just past the
    ElementDataFile line, where a LOCAL payload begins.
    """
    fields = {}
    pos = 0
    while pos < len(raw):
        newline = raw.find(b"\n", pos)
        end = len(raw) if newline < 0 else newline
        line = raw[pos:end]
        pos = end + 1
        try:
            text = line.decode("ascii").strip()
        except UnicodeDecodeError:
            raise MalformedHeader(
                f"{path.name}: binary data reached before ElementDataFile"
            ) from None
        if not text:
            continue
        key, sep, value = text.partition("=")
        if not sep:
            raise MalformedHeader(f"{path.name}: header line without '=': {text!r}")
        key = key.strip()
        fields[key] = value.strip()
        if key == "ElementDataFile":
            return fields, pos
    raise MalformedHeader(f"{path.name}: missing ElementDataFile")


def read_metaimage_header(raw: bytes, path: Path) -> tuple[VolumeHeader, int]:
    """Parse a MetaImage header; returns the header and the payload offset."""
    fields, data_start = _split_header_lines(raw, path)
    for required in ("NDims", "DimSize", "ElementType"):
        if required not in fields:
            raise MalformedHeader(f"{path.name}: missing {required}")
    try:
        ndims = int(fields["NDims"])
    except ValueError:
        raise MalformedHeader(f"{path.name}: NDims is not an integer") from None
    if ndims not in (2, 3):
        raise MalformedHeader(f"{path.name}: NDims={ndims} not supported (2D or 3D only)")
    try:
        dim_size = tuple(int(v) for v in fields["DimSize"].split())
    except ValueError:
        raise MalformedHeader(f"{path.name}: DimSize is not a list of integers") from None
    if len(dim_size) != ndims or any(n <= 0 for n in dim_size):
        raise MalformedHeader(f"{path.name}: DimSize {fields['DimSize']!r} is invalid")

    element_type = fields["ElementType"]
    if element_type not in _METAIMAGE_TYPES:
        raise UnsupportedDatatype(f"{path.name}: ElementType {element_type} not supported")
    if not _parse_bool(fields.get("BinaryData", "True")):
        raise UnsupportedDatatype(f"{path.name}: ASCII element data not supported")
    if int(fields.get("ElementNumberOfChannels", "1")) != 1:
        raise UnsupportedDatatype(f"{path.name}: multi-channel images are not label volumes")

    if "ElementSpacing" in fields:
        try:
            spacing_xyz = tuple(float(v) for v in fields["ElementSpacing"].split())
        except ValueError:
            raise MalformedHeader(f"{path.name}: ElementSpacing is not numeric") from None
        if len(spacing_xyz) != ndims:
            raise MalformedHeader(f"{path.name}: ElementSpacing length != NDims")
        if any(not (s > 0) for s in spacing_xyz):
            raise InvalidSpacing(f"{path.name}: ElementSpacing must be positive")
    else:
        spacing_xyz = (1.0,) * ndims

    msb = _parse_bool(
        fields.get("BinaryDataByteOrderMSB", fields.get("ElementByteOrderMSB", "False"))
    )
    compressed = _parse_bool(fields.get("CompressedData", "False"))

    data_file = fields["ElementDataFile"]
    local = data_file == "LOCAL"
    if not local and len(data_file.split()) != 1:
        raise MalformedHeader(f"{path.name}: per-slice ElementDataFile lists not supported")

    dims = tuple(reversed(dim_size))
    spacing = tuple(float(s) for s in reversed(spacing_xyz))
    if ndims == 2:
        dims = (1,) + dims
        spacing = (1.0,) + spacing
    header = VolumeHeader(
        dims=dims,
        spacing=spacing,
        dtype=np.dtype(_METAIMAGE_TYPES[element_type]),
        byte_order=">" if msb else "<",
        data_offset=data_start if local else None,
        data_file=None if local else data_file,
        compressed=compressed,
    )
    return header, data_start


def load_metaimage(path) -> LabelVolume:
    """Load a .mhd or .mha file into a canonical LabelVolume.

    For .mhd, ElementDataFile names a raw payload next to the header;
    for .mha the payload follows the header in the same file.  Payloads
    flagged CompressedData are zlib streams.
    """
    path = Path(path)
    raw = path.read_bytes()
    header, data_start = read_metaimage_header(raw, path)

    if header.data_file is None:
        payload = raw[data_start:]
    else:
        payload = (path.parent / header.data_file).read_bytes()
    if header.compressed:
        try:
            payload = zlib.decompress(payload)
        except zlib.error as exc:
            raise DataSizeMismatch(f"{path.name}: compressed payload is corrupt: {exc}") from exc

    expected = int(np.prod(header.dims)) * header.dtype.itemsize
    if len(payload) != expected:
        raise DataSizeMismatch(
            f"{path.name}: payload is {len(payload)} bytes, expected {expected}"
        )
    flat = np.frombuffer(payload, dtype=header.dtype.newbyteorder(header.byte_order))
    return _finish_volume(flat.reshape(header.dims), header.spacing)


# ---------------------------------------------------------------------------
# NIfTI-1
# ---------------------------------------------------------------------------

def read_nifti_header(raw: bytes, path: Path):
    """Parse the fixed 348-byte NIfTI-1 header.

    Returns (VolumeHeader, scl_slope, scl_inter, is_pair) where is_pair
    is true for the two-file "ni1" flavour whose payload lives in a
    sibling .img file.
    """
    if len(raw) < 348:
        raise MalformedHeader(f"{path.name}: shorter than the 348-byte NIfTI-1 header")
    if struct.unpack_from("<i", raw, 0)[0] == 348:
        order = "<"
    elif struct.unpack_from(">i", raw, 0)[0] == 348:
        order = ">"
    else:
        raise MalformedHeader(f"{path.name}: sizeof_hdr != 348, not a NIfTI-1 file")
    magic = raw[344:348]
    if magic not in _NIFTI_MAGICS:
        raise MalformedHeader(f"{path.name}: bad NIfTI magic {magic!r}")

    dim = struct.unpack_from(order + "8h", raw, 40)
    ndim = dim[0]
    if ndim < 2 or ndim > 7:
        raise MalformedHeader(f"{path.name}: dim[0]={ndim} not supported")
    if ndim > 3 and any(dim[i] > 1 for i in range(4, ndim + 1)):
        raise MalformedHeader(f"{path.name}: volume has more than 3 non-trivial dimensions")
    nx, ny = dim[1], dim[2]
    nz = dim[3] if ndim >= 3 else 1
    if nx <= 0 or ny <= 0 or nz <= 0:
        raise MalformedHeader(f"{path.name}: non-positive dim entries {dim[1:4]}")

    datatype = struct.unpack_from(order + "h", raw, 70)[0]
    if datatype not in _NIFTI_TYPES:
        raise UnsupportedDatatype(f"{path.name}: NIfTI datatype code {datatype} not supported")

    pixdim = struct.unpack_from(order + "8f", raw, 76)
    sx, sy = pixdim[1], pixdim[2]
    sz = pixdim[3] if ndim >= 3 else 1.0
    if any(not (s > 0 and np.isfinite(s)) for s in (sx, sy, sz)):
        raise InvalidSpacing(f"{path.name}: pixdim[1..3] must be positive, got {(sx, sy, sz)}")

    vox_offset = int(round(struct.unpack_from(order + "f", raw, 108)[0]))
    scl_slope = struct.unpack_from(order + "f", raw, 112)[0]
    scl_inter = struct.unpack_from(order + "f", raw, 116)[0]

    is_pair = magic == b"ni1\x00"
    if is_pair:
        offset = max(vox_offset, 0)
    else:
        offset = vox_offset if vox_offset > 0 else 352
        if offset < 348:
            raise MalformedHeader(f"{path.name}: vox_offset {vox_offset} overlaps the header")

    header = VolumeHeader(
        dims=(int(nz), int(ny), int(nx)),
        spacing=(float(sz), float(sy), float(sx)),
        dtype=np.dtype(_NIFTI_TYPES[datatype]),
        byte_order=order,
        data_offset=offset,
        data_file=None,
        compressed=False,
    )
    return header, float(scl_slope), float(scl_inter), is_pair


def _read_maybe_gzipped(path: Path) -> bytes:
    raw = path.read_bytes()
    if raw[:2] == _GZIP_MAGIC:
        return gzip.decompress(raw)
    return raw


def load_nifti(path) -> LabelVolume:
    """Load a .nii or .nii.gz file into a canonical LabelVolume.

    The gzip container is detected by magic, not suffix.  Scaling
    slope/intercept are applied before the integer-label cast; supported
    scalar codes are 8/16/32-bit integers and 32/64-bit floats.
    """
    path = Path(path)
    raw = _read_maybe_gzipped(path)
    header, slope, inter, is_pair = read_nifti_header(raw, path)

    if is_pair:
        img_path = path.with_suffix(".img") if path.suffix else path.parent / (path.name + ".img")
        if str(path).lower().endswith(".nii.gz"):
            img_path = path.with_name(path.name[: -len(".nii.gz")] + ".img")
        if not img_path.exists():
            raise MalformedHeader(f"{path.name}: ni1 header but no payload file {img_path.name}")
        data = _read_maybe_gzipped(img_path)
    else:
        data = raw

    expected = int(np.prod(header.dims)) * header.dtype.itemsize
    payload = data[header.data_offset : header.data_offset + expected]
    if len(payload) != expected:
        raise DataSizeMismatch(
            f"{path.name}: payload is {len(payload)} bytes, expected {expected}"
        )
    flat = np.frombuffer(payload, dtype=header.dtype.newbyteorder(header.byte_order))
    arr = _to_native(flat.reshape(header.dims))

    # slope 0 means "no scaling stored" per the NIfTI-1 convention
    if np.isfinite(slope) and slope != 0.0 and (slope != 1.0 or inter != 0.0):
        arr = arr.astype(np.float64) * slope + (inter if np.isfinite(inter) else 0.0)
    return _finish_volume(arr, header.spacing)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

def load_volume(path, spacing_override=None) -> LabelVolume:
    """Load any supported image; optionally force the voxel spacing.

    ``spacing_override`` is interpreted in canonical axis order
    (slowest axis first) and replaces whatever the header says.
    """
    fmt = detect_format(path)
    if fmt is ImageFormat.METAIMAGE:
        volume = load_metaimage(path)
    else:
        volume = load_nifti(path)
    if spacing_override is not None:
        volume = replace(volume, spacing=_validated_spacing(spacing_override))
    return volume
