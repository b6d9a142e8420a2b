"""File formats: dataset CSV, IDX ingestion, model binaries and JSONL metrics.

CSV layout::

    f0,f1,...,f{d-1},label,clean_label
    0.12345678901234567,...,1,0
    # lines starting with '#' are comments (audit footers)

Model binary layout (little-endian)::

    b"NCTM"  magic
    uint32   format version (1)
    uint32   number of layer dims L
    uint32   L layer dims
    float64  parameters, per layer W (fan_in x fan_out, row-major) then b
"""
import csv
import io as _io
import json
import struct

import numpy as np

from .data import LabeledDataset
from .errors import FormatError
from .nn import MlpModel

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801
MODEL_MAGIC = b"NCTM"
MODEL_VERSION = 1


# -- CSV -------------------------------------------------------------------------


def _fmt(v):
    return format(float(v), ".17g")


def dumps_csv(ds):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"f{j}" for j in range(ds.dim)] + ["label", "clean_label"])
    for x, y, c in zip(ds.features, ds.labels, ds.clean_labels):
        w.writerow([_fmt(v) for v in x] + [int(y), int(c)])
    return buf.getvalue()


def save_csv(ds, path):
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(dumps_csv(ds))


def load_csv(path, num_classes=None):
    """Read a dataset CSV.  Without a ``clean_label`` column the labels are
    taken as clean and the dataset is flagged ``assumed_clean``."""
    with open(path, encoding="utf-8", newline="") as f:
        lines = [(k, line) for k, line in enumerate(f, start=1) if line.strip() and not line.startswith("#")]
    if not lines:
        raise FormatError(f"{path}: empty file")
    header_line, header = lines[0][0], next(csv.reader([lines[0][1]]))
    header = [h.strip() for h in header]
    if "label" not in header:
        raise FormatError("missing 'label' column", line=header_line)
    has_clean = "clean_label" in header
    feat_cols = [j for j, h in enumerate(header) if h.startswith("f") and h[1:].isdigit()]
    expected = [f"f{j}" for j in range(len(feat_cols))] + ["label"] + (["clean_label"] if has_clean else [])
    if header != expected:
        raise FormatError(f"unexpected header {header}; expected {expected}", line=header_line)
    d = len(feat_cols)
    feats, labels, clean = [], [], []
    for lineno, line in lines[1:]:
        row = next(csv.reader([line]))
        if len(row) != len(header):
            raise FormatError(f"expected {len(header)} fields, got {len(row)}", line=lineno)
        try:
            feats.append([float(v) for v in row[:d]])
        except ValueError as exc:
            raise FormatError(f"non-numeric feature ({exc})", line=lineno) from None
        try:
            labels.append(int(row[d]))
            clean.append(int(row[d + 1]) if has_clean else labels[-1])
        except ValueError:
            raise FormatError("labels must be integers", line=lineno) from None
        if labels[-1] < 0 or clean[-1] < 0:
            raise FormatError("labels must be nonnegative", line=lineno)
        if num_classes is not None and max(labels[-1], clean[-1]) >= num_classes:
            raise FormatError(f"label >= num_classes={num_classes}", line=lineno)
    labels = np.array(labels, dtype=np.int64)
    clean = np.array(clean, dtype=np.int64)
    if num_classes is None:
        num_classes = max(int(labels.max(initial=0)), int(clean.max(initial=0))) + 1
    return LabeledDataset(
        np.array(feats, dtype=np.float64).reshape(len(labels), d),
        labels,
        clean,
        max(num_classes, 2),
        assumed_clean=not has_clean,
    )


# -- IDX ---------------------------------------------------------------------------


def _read_idx(path, magic, ndim):
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < 4 + 4 * ndim:
        raise FormatError(f"{path}: truncated header")
    got = struct.unpack(">I", raw[:4])[0]
    if got != magic:
        raise FormatError(f"{path}: bad magic 0x{got:08x}, expected 0x{magic:08x}")
    dims = struct.unpack(f">{ndim}I", raw[4:4 + 4 * ndim])
    body = raw[4 + 4 * ndim:]
    count = int(np.prod(dims))
    if len(body) != count:
        raise FormatError(f"{path}: expected {count} data bytes, found {len(body)}")
    return np.frombuffer(body, dtype=np.uint8).reshape(dims)


def load_idx(images_path, labels_path, num_classes=None):
    """MNIST-style IDX pair -> dataset with pixels scaled to [0, 1]."""
    images = _read_idx(images_path, IDX_IMAGES_MAGIC, 3)
    labels = _read_idx(labels_path, IDX_LABELS_MAGIC, 1).astype(np.int64)
    if len(images) != len(labels):
        raise FormatError(f"{len(images)} images but {len(labels)} labels")
    features = images.reshape(len(images), -1).astype(np.float64) / 255.0
    if num_classes is None:
        num_classes = max(int(labels.max(initial=0)) + 1, 2)
    return LabeledDataset(features, labels, labels.copy(), num_classes)


def write_idx(images, labels, images_path, labels_path):
    images = np.asarray(images, dtype=np.uint8)
    labels = np.asarray(labels, dtype=np.uint8)
    with open(images_path, "wb") as f:
        f.write(struct.pack(">I", IDX_IMAGES_MAGIC) + struct.pack(">3I", *images.shape) + images.tobytes())
    with open(labels_path, "wb") as f:
        f.write(struct.pack(">I", IDX_LABELS_MAGIC) + struct.pack(">I", len(labels)) + labels.tobytes())


# -- models ----------------------------------------------------------------------


def model_to_bytes(model):
    dims = model.layer_dims
    out = [MODEL_MAGIC, struct.pack("<II", MODEL_VERSION, len(dims)), struct.pack(f"<{len(dims)}I", *dims)]
    for p in model.parameters():
        out.append(np.ascontiguousarray(p, dtype="<f8").tobytes())
    return b"".join(out)


def model_from_bytes(raw):
    if raw[:4] != MODEL_MAGIC:
        raise FormatError("not a model file (bad magic)")
    if len(raw) < 12:
        raise FormatError("truncated model header")
    version, ndims = struct.unpack("<II", raw[4:12])
    if version != MODEL_VERSION:
        raise FormatError(f"unsupported model format version {version}")
    head = 12 + 4 * ndims
    dims = struct.unpack(f"<{ndims}I", raw[12:head])
    values = np.frombuffer(raw[head:], dtype="<f8")
    sizes = []
    for a, b in zip(dims[:-1], dims[1:]):
        sizes.extend([(a, b), (b,)])
    if values.size != sum(int(np.prod(s)) for s in sizes):
        raise FormatError("parameter block size does not match layer dims")
    params, offset = [], 0
    for shape in sizes:
        k = int(np.prod(shape))
        params.append(values[offset:offset + k].astype(np.float64).reshape(shape))
        offset += k
    return MlpModel(tuple(dims), params[0::2], params[1::2])


def save_model(model, path):
    with open(path, "wb") as f:
        f.write(model_to_bytes(model))


def load_model(path):
    with open(path, "rb") as f:
        return model_from_bytes(f.read())


# -- metrics -----------------------------------------------------------------------


def dumps_record(record):
    return json.dumps(record, allow_nan=False)


def append_records(path, records):
    with open(path, "a", encoding="utf-8") as f:
        for rec in records:
            f.write(dumps_record(rec) + "\n")


def read_records(path):
    out = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if line.strip():
                try:
                    out.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise FormatError(f"invalid JSON ({exc.msg})", line=lineno) from None
    return out
