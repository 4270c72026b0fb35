"""JSON net documents.

A document is a JSON object with the fields ``format_version``, ``kind``,
``ambient``, ``box``, ``payload`` and ``provenance``.  Floats are written with
17 significant digits so that reading a written document gives back the
same binary values.  Unknown fields are rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import NetFormatError, UnsupportedVersionError

FORMAT_VERSION = 1
KINDS = ("euclidean", "projective", "quadric", "plane", "sphere")
BASES = ("euclidean", "projective", "moebius", "lie")
TOP_FIELDS = {"format_version", "kind", "ambient", "box", "payload", "provenance"}
AMBIENT_FIELDS = {"signature", "basis"}

# payload entries: name -> number of trailing (non-lattice) axes
_OPTIONAL = {"labels": None, "coefficients": None, "s": 0}
PAYLOAD = {
    "euclidean": ({"vertices": 1}, {**_OPTIONAL}),
    "projective": ({"vertices": 1}, {**_OPTIONAL}),
    "quadric": ({"vertices": 1, "kappa0": "scalar"}, {**_OPTIONAL}),
    "plane": ({"normals": 1, "offsets": 0}, {**_OPTIONAL}),
    "sphere": ({"centers": 1, "radii": 0, "kappa": "scalar"}, {**_OPTIONAL}),
}


@dataclass
class NetDocument:
    kind: str
    payload: dict
    box: tuple[int, ...]
    signature: tuple[int, int] = (3, 0)
    basis: str = "euclidean"
    provenance: str = ""
    format_version: int = FORMAT_VERSION
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.box = tuple(int(n) for n in self.box)
        self.signature = tuple(int(n) for n in self.signature)
        validate(self)

    def array(self, name: str) -> np.ndarray:
        return np.asarray(self.payload[name], dtype=float)

    def labels(self):
        """Edge labels as a tuple of arrays, or ``None``."""
        lab = self.payload.get("labels")
        return None if lab is None else tuple(np.asarray(v, dtype=float) for v in lab)

    def coefficients(self):
        """Face coefficients keyed (i, j), or ``None``."""
        c = self.payload.get("coefficients")
        if c is None:
            return None
        return {tuple(int(k) for k in key.split(",")): np.asarray(v, dtype=float) for key, v in c.items()}


def _where(path, msg):
    return NetFormatError(f"{path}: {msg}")


def validate(doc: NetDocument) -> None:
    if doc.format_version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"format_version {doc.format_version} is not supported (expected {FORMAT_VERSION})")
    if doc.kind not in KINDS:
        raise _where("kind", f"unknown kind {doc.kind!r}; expected one of {', '.join(KINDS)}")
    if doc.basis not in BASES:
        raise _where("ambient.basis", f"unknown basis {doc.basis!r}")
    if len(doc.signature) != 2 or min(doc.signature) < 0:
        raise _where("ambient.signature", "expected [p, q] with p, q >= 0")
    if not doc.box or min(doc.box) < 1:
        raise _where("box", "extents must be positive integers")
    required, optional = PAYLOAD[doc.kind]
    unknown = set(doc.payload) - set(required) - set(optional)
    if unknown:
        raise _where("payload", f"unknown field(s) {sorted(unknown)} for format_version {FORMAT_VERSION}")
    for name, trailing in required.items():
        if name not in doc.payload:
            raise _where("payload", f"missing required field {name!r} for kind {doc.kind!r}")
    for name, trailing in {**required, **optional}.items():
        if name not in doc.payload or trailing is None or trailing == "scalar":
            continue
        arr = np.asarray(doc.payload[name], dtype=float)
        if arr.shape[: len(doc.box)] != doc.box or arr.ndim != len(doc.box) + trailing:
            raise _where(f"payload.{name}", f"shape {arr.shape} does not match box {doc.box}")
    dim = sum(doc.signature)
    for name in ("vertices", "normals", "centers"):
        if name in doc.payload:
            arr = np.asarray(doc.payload[name], dtype=float)
            if name == "vertices" and arr.shape[-1] != dim:
                raise _where(f"payload.{name}", f"vectors have length {arr.shape[-1]}, signature needs {dim}")
    m = len(doc.box)
    if doc.payload.get("labels") is not None:
        lab = doc.payload["labels"]
        if len(lab) != m:
            raise _where("payload.labels", f"need {m} label arrays")
        for i, v in enumerate(lab):
            shape = tuple(n - 1 if k == i else n for k, n in enumerate(doc.box))
            if np.asarray(v, dtype=float).shape != shape:
                raise _where(f"payload.labels[{i}]", f"shape must be {shape}")
    if doc.payload.get("coefficients") is not None:
        for key, v in doc.payload["coefficients"].items():
            try:
                i, j = (int(k) for k in key.split(","))
            except ValueError:
                raise _where("payload.coefficients", f"bad key {key!r}; expected 'i,j'") from None
            shape = tuple(n - 1 if k + 1 in (i, j) else n for k, n in enumerate(doc.box))
            if np.asarray(v, dtype=float).shape != shape:
                raise _where(f"payload.coefficients.{key}", f"shape must be {shape}")


def _emit(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _emit(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "NaN"
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        return "%.17g" % x
    return json.dumps(obj)


def to_dict(doc: NetDocument) -> dict:
    return {
        "format_version": doc.format_version,
        "kind": doc.kind,
        "ambient": {"signature": list(doc.signature), "basis": doc.basis},
        "box": list(doc.box),
        "payload": doc.payload,
        "provenance": doc.provenance,
    }


def dumps(doc: NetDocument) -> str:
    return _emit(to_dict(doc), 1, 0) + "\n"


def write_net(doc: NetDocument, path) -> None:
    Path(path).write_text(dumps(doc))


def _arrays(payload):
    out = {}
    for k, v in payload.items():
        if k == "coefficients" and v is not None:
            out[k] = {str(key): np.asarray(a, dtype=float) for key, a in v.items()}
        elif k == "labels" and v is not None:
            out[k] = [np.asarray(a, dtype=float) for a in v]
        elif isinstance(v, list):
            out[k] = np.asarray(v, dtype=float)
        else:
            out[k] = v
    return out


def from_dict(data) -> NetDocument:
    if not isinstance(data, dict):
        raise _where("$", "document must be a JSON object")
    version = data.get("format_version")
    if version is None:
        raise _where("format_version", "missing")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"format_version {version!r} is not supported (expected {FORMAT_VERSION})")
    unknown = set(data) - TOP_FIELDS
    if unknown:
        raise _where("$", f"unknown field(s) {sorted(unknown)} for format_version {FORMAT_VERSION}")
    missing = TOP_FIELDS - set(data) - {"provenance"}
    if missing:
        raise _where("$", f"missing field(s) {sorted(missing)}")
    amb = data["ambient"]
    if not isinstance(amb, dict) or set(amb) - AMBIENT_FIELDS or "signature" not in amb:
        raise _where("ambient", "expected an object with 'signature' and optional 'basis'")
    if not isinstance(data["payload"], dict):
        raise _where("payload", "must be an object")
    try:
        return NetDocument(
            kind=data["kind"], payload=_arrays(data["payload"]), box=tuple(data["box"]),
            signature=tuple(amb["signature"]), basis=amb.get("basis", "euclidean"),
            provenance=str(data.get("provenance", "")), format_version=version)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, NetFormatError):
            raise
        raise _where("payload", f"invalid array data ({exc})") from None


def loads(text: str) -> NetDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_dict(data)


def read_net(path) -> NetDocument:
    return loads(Path(path).read_text())


# constructors for each kind

def euclidean_document(vertices, s=None, labels=None, provenance: str = "") -> NetDocument:
    v = np.asarray(vertices, dtype=float)
    payload = {"vertices": v}
    if s is not None:
        payload["s"] = np.asarray(s, dtype=float)
    if labels is not None:
        payload["labels"] = [np.asarray(a, dtype=float) for a in labels]
    return NetDocument("euclidean", payload, v.shape[:-1], (v.shape[-1], 0), "euclidean", provenance)


def projective_document(vertices, coefficients=None, signature=None, basis="projective",
                        provenance: str = "") -> NetDocument:
    v = np.asarray(vertices, dtype=float)
    payload = {"vertices": v}
    if coefficients is not None:
        payload["coefficients"] = {f"{i},{j}": np.asarray(a, dtype=float) for (i, j), a in coefficients.items()}
    sig = signature or (v.shape[-1], 0)
    return NetDocument("projective", payload, v.shape[:-1], sig, basis, provenance)


def quadric_document(vertices, kappa0: float, signature, basis="euclidean", coefficients=None,
                     provenance: str = "") -> NetDocument:
    v = np.asarray(vertices, dtype=float)
    payload = {"vertices": v, "kappa0": float(kappa0)}
    if coefficients is not None:
        payload["coefficients"] = {f"{i},{j}": np.asarray(a, dtype=float) for (i, j), a in coefficients.items()}
    return NetDocument("quadric", payload, v.shape[:-1], signature, basis, provenance)


def plane_document(net, provenance: str = "") -> NetDocument:
    payload = {"normals": np.asarray(net.normals, dtype=float), "offsets": np.asarray(net.offsets, dtype=float)}
    return NetDocument("plane", payload, net.offsets.shape, (4, 2), "lie", provenance)


def sphere_document(net, provenance: str = "") -> NetDocument:
    payload = {"centers": net.centers, "radii": net.radii, "kappa": float(net.kappa)}
    return NetDocument("sphere", payload, net.radii.shape, (4, 1), "moebius", provenance)


def plane_net(doc: NetDocument):
    from .laguerre import PlaneNet
    return PlaneNet(doc.array("normals"), doc.array("offsets"))


def sphere_congruence(doc: NetDocument):
    from .lie import SphereCongruence
    return SphereCongruence(doc.array("centers"), doc.array("radii"), float(doc.payload["kappa"]))
