"""File formats: models, partitions, palettes, Netpbm images, DOT, renders.

Model files are JSON::

    {"points": [{"id": "x11", "props": ["r"]}], "edges": [["x11", "x12"]]}

Partition files are ``{"classes": [["x11", "x21"], ["x12"]]}`` and projection
files ``{"map": {"x11": "q0"}}``.  Unknown fields are rejected.
"""
import io as _io
import json
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidPartitionError, ModelError
from .model import Partition, QdModel

# ------------------------------------------------------------------ models


def _expect_keys(obj, allowed, where, required=()):
    if not isinstance(obj, dict):
        raise ModelError(f"{where}: expected an object")
    extra = sorted(set(obj) - set(allowed))
    if extra:
        raise ModelError(f"{where}: unknown field {extra[0]!r}")
    for k in required:
        if k not in obj:
            raise ModelError(f"{where}: missing field {k!r}")


def model_from_dict(doc):
    _expect_keys(doc, ("points", "edges"), "$", required=("points",))
    points = doc["points"]
    if not isinstance(points, list):
        raise ModelError("$.points: expected a list")
    names, val, index = [], {}, {}
    for k, pt in enumerate(points):
        where = f"$.points[{k}]"
        _expect_keys(pt, ("id", "props"), where, required=("id",))
        name = pt["id"]
        if not isinstance(name, str):
            raise ModelError(f"{where}.id: expected a string")
        if name in index:
            raise ModelError(f"{where}.id: duplicate point id {name!r}")
        index[name] = len(names)
        names.append(name)
        props = pt.get("props", [])
        if not isinstance(props, list) or not all(isinstance(p, str) for p in props):
            raise ModelError(f"{where}.props: expected a list of strings")
        for p in props:
            val.setdefault(p, []).append(index[name])
    edges = []
    raw = doc.get("edges", [])
    if not isinstance(raw, list):
        raise ModelError("$.edges: expected a list")
    for k, e in enumerate(raw):
        if not (isinstance(e, list) and len(e) == 2):
            raise ModelError(f"$.edges[{k}]: expected a pair of point ids")
        for j, end in enumerate(e):
            if end not in index:
                raise ModelError(f"$.edges[{k}][{j}]: unknown point {end!r}")
        edges.append((index[e[0]], index[e[1]]))
    return QdModel(names, edges, val)


def model_to_dict(model):
    points = [{"id": name, "props": sorted(model.labels[i])} for i, name in enumerate(model.names)]
    edges = sorted([model.names[a], model.names[b]] for a, b in model.edges())
    return {"points": points, "edges": edges}


def load_model(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"model file is not valid JSON: {exc}") from None
    return model_from_dict(doc)


def save_model(model):
    d = model_to_dict(model)
    lines = ["{", '  "points": [']
    lines.append(",\n".join("    " + json.dumps(p) for p in d["points"]))
    lines.append("  ],")
    lines.append('  "edges": [')
    if d["edges"]:
        lines.append(",\n".join("    " + json.dumps(e) for e in d["edges"]))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def read_model(path):
    with open(path, encoding="utf-8") as fh:
        return load_model(fh.read())


def write_model(path, model):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(save_model(model))


# -------------------------------------------------------------- partitions

def load_partition(text, model):
    doc = json.loads(text) if isinstance(text, str) else text
    _expect_keys(doc, ("classes",), "$", required=("classes",))
    classes = []
    for k, cls in enumerate(doc["classes"]):
        if not isinstance(cls, list):
            raise ModelError(f"$.classes[{k}]: expected a list of point ids")
        try:
            classes.append([model.id_of(s) for s in cls])
        except ModelError as exc:
            raise ModelError(f"$.classes[{k}]: {exc}") from None
    return Partition.from_classes(classes, model.n)


def save_partition(model, partition):
    return json.dumps({"classes": partition.class_names(model)}) + "\n"


def save_projection(model, quotient, projection):
    return json.dumps({"map": {model.names[i]: quotient.names[int(q)]
                               for i, q in enumerate(projection)}}, indent=1) + "\n"


# ---------------------------------------------------------------- palettes

ADJACENCIES = ("orthogonal4", "chebyshev8")


@dataclass(frozen=True)
class PaletteConfig:
    """Pixel colours (RGB triples; grey ``g`` stands for ``(g, g, g)``) to proposition names."""

    colors: dict = field(default_factory=dict)
    adjacency: str = "chebyshev8"

    def __post_init__(self):
        if not self.colors:
            raise ModelError("palette needs at least one colour")
        if self.adjacency not in ADJACENCIES:
            raise ModelError(f"unknown adjacency {self.adjacency!r}; use one of {', '.join(ADJACENCIES)}")


def _parse_color(key):
    if isinstance(key, int):
        g = key
    elif isinstance(key, str) and re.fullmatch(r"#[0-9a-fA-F]{6}", key):
        v = int(key[1:], 16)
        return (v >> 16, (v >> 8) & 255, v & 255)
    elif isinstance(key, str) and key.isdigit():
        g = int(key)
    else:
        raise ModelError(f"palette colour {key!r} is neither #rrggbb nor a grey level")
    if not 0 <= g <= 255:
        raise ModelError(f"grey level {g} out of range")
    return (g, g, g)


def palette_from_dict(doc):
    _expect_keys(doc, ("adjacency", "colors"), "$", required=("colors",))
    colors = {}
    for key, prop in doc["colors"].items():
        rgb = _parse_color(key)
        if rgb in colors:
            raise ModelError(f"palette colour {key!r} listed twice")
        colors[rgb] = str(prop)
    return PaletteConfig(colors, doc.get("adjacency", "chebyshev8"))


def load_palette(text):
    return palette_from_dict(json.loads(text))


def palette_to_dict(cfg):
    return {"adjacency": cfg.adjacency,
            "colors": {"#%02x%02x%02x" % rgb: p for rgb, p in cfg.colors.items()}}


# ----------------------------------------------------------------- netpbm

_MAGIC = {b"P2": (False, 1), b"P3": (False, 3), b"P5": (True, 1), b"P6": (True, 3)}


def read_netpbm(data):
    """Decode PGM/PPM (plain or raw) into a ``(h, w)`` or ``(h, w, 3)`` array."""
    magic = bytes(data[:2])
    if magic not in _MAGIC:
        raise ModelError("not a PGM/PPM image (expected P2, P3, P5 or P6)")
    raw, channels = _MAGIC[magic]
    pos, header = 2, []
    while len(header) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ModelError("truncated image header")
        try:
            header.append(int(data[start:pos]))
        except ValueError:
            raise ModelError("malformed image header") from None
    w, h, maxval = header
    if w <= 0 or h <= 0 or not 0 < maxval < 65536:
        raise ModelError("image header has invalid dimensions or maxval")
    count = w * h * channels
    if raw:
        pos += 1  # exactly one whitespace byte before the raster
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
        nbytes = count * dtype.itemsize
        body = data[pos:pos + nbytes]
        if len(body) < nbytes:
            raise ModelError("image raster is truncated")
        arr = np.frombuffer(body, dtype=dtype).astype(np.uint16 if maxval > 255 else np.uint8)
    else:
        text = re.sub(rb"#[^\n\r]*", b" ", bytes(data[pos:]))
        vals = text.split()
        if len(vals) < count:
            raise ModelError("image raster is truncated")
        arr = np.array([int(v) for v in vals[:count]], dtype=np.uint16 if maxval > 255 else np.uint8)
    if arr.max(initial=0) > maxval:
        raise ModelError("sample exceeds maxval")
    shape = (h, w, 3) if channels == 3 else (h, w)
    return arr.reshape(shape), maxval


def write_netpbm(arr, plain=False):
    """Encode a uint8 ``(h, w)`` array as PGM or ``(h, w, 3)`` as PPM."""
    arr = np.asarray(arr, dtype=np.uint8)
    colour = arr.ndim == 3
    h, w = arr.shape[:2]
    magic = ("P3" if colour else "P2") if plain else ("P6" if colour else "P5")
    head = f"{magic}\n{w} {h}\n255\n".encode()
    if not plain:
        return head + arr.tobytes()
    rows = [" ".join(str(v) for v in row.reshape(-1)) for row in arr]
    return head + ("\n".join(rows) + "\n").encode()


def decode_image(data):
    """Decode to an ``(h, w, 3)`` uint8 RGB array; PNG needs Pillow."""
    data = bytes(data)
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        try:
            from PIL import Image
        except ImportError:  # pragma: no cover
            raise ModelError("PNG input needs Pillow (pip install 'artifact[png]')") from None
        img = np.asarray(Image.open(_io.BytesIO(data)).convert("RGB"))
        return img
    arr, maxval = read_netpbm(data)
    if maxval != 255:
        arr = np.round(arr.astype(np.float64) * 255 / maxval).astype(np.uint8)
    if arr.ndim == 2:
        arr = np.repeat(arr[:, :, None], 3, axis=2)
    return arr.astype(np.uint8)


def encode_image(arr, fmt="ppm"):
    if fmt == "png":
        try:
            from PIL import Image
        except ImportError:  # pragma: no cover
            raise ModelError("PNG output needs Pillow (pip install 'artifact[png]')") from None
        buf = _io.BytesIO()
        Image.fromarray(np.asarray(arr, dtype=np.uint8)).save(buf, format="PNG")
        return buf.getvalue()
    return write_netpbm(arr)


# --------------------------------------------------------------- ingestion

_OFFSETS = {
    "orthogonal4": ((-1, 0), (1, 0), (0, -1), (0, 1)),
    "chebyshev8": ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)),
}


@dataclass(frozen=True)
class GridModel:
    base: QdModel
    width: int
    height: int
    palette: PaletteConfig

    def pixel_of(self, point):
        return divmod(self.base.id_of(point), self.width)

    def point_at(self, row, col):
        return row * self.width + col


def grid_edges(height, width, adjacency):
    """Self-loops plus symmetric neighbour edges, row-major point ids."""
    ids = np.arange(height * width, dtype=np.int64).reshape(height, width)
    src, dst = [ids.ravel()], [ids.ravel()]
    for dr, dc in _OFFSETS[adjacency]:
        r0, r1 = max(0, -dr), height - max(0, dr)
        c0, c1 = max(0, -dc), width - max(0, dc)
        src.append(ids[r0:r1, c0:c1].ravel())
        dst.append(ids[r0 + dr:r1 + dr, c0 + dc:c1 + dc].ravel())
    return np.concatenate(src), np.concatenate(dst)


def image_to_model(data, cfg):
    """One point per pixel, adjacency per ``cfg``, one proposition per colour."""
    img = decode_image(data) if isinstance(data, (bytes, bytearray, memoryview)) else np.asarray(data)
    if img.ndim == 2:
        img = np.repeat(img[:, :, None], 3, axis=2)
    h, w = img.shape[:2]
    code = (img[:, :, 0].astype(np.int64) << 16) | (img[:, :, 1].astype(np.int64) << 8) | img[:, :, 2]
    code = code.ravel()
    keys = np.array([(r << 16) | (g << 8) | b for r, g, b in cfg.colors], dtype=np.int64)
    props = list(cfg.colors.values())
    order = np.argsort(keys)
    pos = np.searchsorted(keys[order], code)
    pos = np.minimum(pos, keys.size - 1)
    known = keys[order][pos] == code
    if not known.all():
        bad = np.flatnonzero(~known)
        where = ", ".join(f"({r},{c})" for r, c in (divmod(int(i), w) for i in bad[:5]))
        c = int(code[bad[0]])
        raise ModelError(f"{bad.size} pixel(s) with colours missing from the palette, e.g. "
                         f"#{c:06x} at (row,col) {where}")
    which = order[pos]
    val = {}
    for k, p in enumerate(props):
        val.setdefault(p, []).extend(np.flatnonzero(which == k).tolist())
    src, dst = grid_edges(h, w, cfg.adjacency)
    names = [f"r{r}c{c}" for r in range(h) for c in range(w)]
    base = QdModel(names, np.stack([src, dst], axis=1), val)
    return GridModel(base, w, h, cfg)


# ---------------------------------------------------------------- rendering

def class_color(k):
    """Distinct deterministic 24-bit colour per class index (a bijection on 24 bits)."""
    v = (int(k) * 0x9E3779 + 0x7F4A7C) & 0xFFFFFF
    v ^= v >> 12
    v = (v * 0x2545F5) & 0xFFFFFF
    v ^= v >> 11
    return (v >> 16, (v >> 8) & 255, v & 255)


def render_classes(grid, partition, fmt="ppm"):
    if partition.n != grid.base.n:
        raise InvalidPartitionError("partition does not match the grid model")
    lut = np.array([class_color(k) for k in range(len(partition))], dtype=np.uint8)
    img = lut[partition.class_of].reshape(grid.height, grid.width, 3)
    return encode_image(img, fmt)


# --------------------------------------------------------------------- DOT

def _dot_id(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(model, partition=None):
    lines = ["digraph model {", "  node [style=filled, fillcolor=white];"]
    for i, name in enumerate(model.names):
        label = name + ("\\n{" + ",".join(sorted(model.labels[i])) + "}" if model.labels[i] else "")
        attrs = [f'label="{label}"']
        if partition is not None and partition.n == model.n:
            attrs.append('fillcolor="#%02x%02x%02x"' % class_color(partition.class_of[i]))
        lines.append(f"  {_dot_id(name)} [{', '.join(attrs)}];")
    for a, b in model.edges():
        lines.append(f"  {_dot_id(model.names[a])} -> {_dot_id(model.names[b])};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- fixtures

def fixture_path(name):
    """Path of a bundled fixture file (``fig6.json``, ``maze32.ppm`` ...)."""
    from importlib.resources import files
    return str(files("closurebisim") / "fixtures" / name)


def load_fixture(name):
    """Bundled model by stem, e.g. ``load_fixture("fig6")``."""
    return read_model(fixture_path(name if name.endswith(".json") else name + ".json"))
