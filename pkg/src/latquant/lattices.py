"""Core lattice representation and the catalog of named component lattices.

A lattice is the set of integer combinations of the rows of a generator
matrix: points are ``z @ G`` for integer row vectors ``z``. Everything here
treats rows as basis vectors.
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np

DET_TOL = 1e-10
SINGULAR_TOL = 1e-12
VOLUME_REL_TOL = 1e-9


class LatticeError(ValueError):
    """Invalid lattice data (dependent rows, degenerate volume, ...)."""


class UnknownLatticeError(KeyError):
    """Requested catalog name does not exist."""


@dataclass(frozen=True)
class GeneratorMatrix:
    """Square full-rank generator matrix; row i is basis vector a_i."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] != rows.shape[1]:
            raise LatticeError(f"generator must be square, got shape {rows.shape}")
        if not np.isfinite(rows).all():
            raise LatticeError("generator contains non-finite entries")
        rows = rows.copy()
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        # scale-aware rank check: |det| relative to row norms
        n = rows.shape[0]
        scale = np.linalg.norm(rows, axis=1).prod()
        if scale <= 0 or abs(np.linalg.det(rows)) <= DET_TOL * scale:
            raise LatticeError("generator rows are linearly dependent")

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    def __eq__(self, other):
        return isinstance(other, GeneratorMatrix) and np.array_equal(self.rows, other.rows)

    def __hash__(self):
        return hash(self.rows.tobytes())


@dataclass(frozen=True)
class LatticeRecord:
    """Named catalog entry with its reference volume and (optional) NSM."""

    name: str
    generator: GeneratorMatrix
    reference_volume: float
    reference_nsm: float | None = None
    comment: str = field(default="", compare=False)

    def __post_init__(self):
        v = volume(self.generator)
        if abs(v - self.reference_volume) > VOLUME_REL_TOL * abs(self.reference_volume):
            raise LatticeError(
                f"{self.name}: generator volume {v!r} does not match "
                f"reference volume {self.reference_volume!r}"
            )

    @property
    def dim(self) -> int:
        return self.generator.dim


def gram(G: GeneratorMatrix) -> np.ndarray:
    """Gram matrix G @ G.T (symmetric positive definite)."""
    return G.rows @ G.rows.T


def volume(G: GeneratorMatrix) -> float:
    """Fundamental volume |det G|."""
    v = abs(np.linalg.det(G.rows))
    if v <= SINGULAR_TOL:
        raise LatticeError("degenerate lattice: |det| below tolerance")
    return float(v)


def scale(G: GeneratorMatrix, a: float) -> GeneratorMatrix:
    """Uniformly scale the lattice; volume scales by a**n."""
    if not a > 0:
        raise LatticeError(f"scale factor must be positive, got {a}")
    return GeneratorMatrix(G.rows * a)


def direct_sum(G1: GeneratorMatrix, G2: GeneratorMatrix) -> GeneratorMatrix:
    """Block-diagonal generator of the Cartesian product lattice."""
    n1, n2 = G1.dim, G2.dim
    out = np.zeros((n1 + n2, n1 + n2))
    out[:n1, :n1] = G1.rows
    out[n1:, n1:] = G2.rows
    return GeneratorMatrix(out)


# ---------------------------------------------------------------------------
# catalog

_CATALOG_ENV = "LATQUANT_CATALOG"
_catalog_cache: dict[str, dict] = {}


def catalog_path() -> str:
    """Path of the active catalog file (override with $LATQUANT_CATALOG)."""
    env = os.environ.get(_CATALOG_ENV)
    if env:
        return env
    return os.path.join(os.path.dirname(__file__), "data", "catalog.json")


def _record_from_dict(entry: dict) -> LatticeRecord:
    rows = np.array([[float(x) for x in row] for row in entry["rows"]])
    if rows.shape != (entry["dim"], entry["dim"]):
        raise LatticeError(f"{entry['name']}: row data does not match dim {entry['dim']}")
    nsm = entry.get("reference_nsm")
    return LatticeRecord(
        name=entry["name"],
        generator=GeneratorMatrix(rows),
        reference_volume=float(entry["reference_volume"]),
        reference_nsm=None if nsm is None else float(nsm),
        comment=entry.get("comment", ""),
    )


def load_catalog(path=None) -> dict[str, dict]:
    """Raw catalog records keyed by name (decimal strings preserved)."""
    path = path or catalog_path()
    if path not in _catalog_cache:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        _catalog_cache[path] = {e["name"]: e for e in data["lattices"]}
    return _catalog_cache[path]


def catalog_names(path=None) -> list[str]:
    return sorted(load_catalog(path), key=_name_sort_key)


def _name_sort_key(name):
    family = name.rstrip("0123456789s")
    rest = name[len(family):]
    dual = rest.endswith("s")
    digits = rest[:-1] if dual else rest
    return (family, int(digits) if digits else 0, dual)


def catalog_get(name: str, path=None) -> LatticeRecord:
    """Look up a named lattice; Z<n> is synthesized for any n.

    "Z" is shorthand for "Z1".
    """
    cat = load_catalog(path)
    if name in cat:
        return _record_from_dict(cat[name])
    if name == "Z":
        name = "Z1"
    if name.startswith("Z") and name[1:].isdigit():
        n = int(name[1:])
        if n >= 1:
            return LatticeRecord(
                name=f"Z{n}",
                generator=GeneratorMatrix(np.eye(n)),
                reference_volume=1.0,
                reference_nsm=1.0 / 12.0,
                comment="integer lattice",
            )
    raise UnknownLatticeError(
        f"unknown lattice {name!r}; available: {', '.join(catalog_names(path))} "
        f"and Z<n> for any n"
    )


def record_to_dict(rec: LatticeRecord) -> dict:
    """Serializable catalog entry; generator entries as decimal strings."""
    entry = {
        "name": rec.name,
        "dim": rec.dim,
        "rows": [[repr(float(x)) for x in row] for row in rec.generator.rows],
        "reference_volume": rec.reference_volume,
        "reference_nsm": rec.reference_nsm,
    }
    if rec.comment:
        entry["comment"] = rec.comment
    return entry


def write_lattice_file(path: str, rec: LatticeRecord) -> None:
    """Write a single-lattice file in the catalog format."""
    payload = {"lattices": [record_to_dict(rec)]}
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, path)


def read_lattice_file(path: str) -> LatticeRecord:
    """Read a single-lattice file written by :func:`write_lattice_file`."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    entries = data["lattices"]
    if len(entries) != 1:
        raise LatticeError(f"{path}: expected exactly one lattice record")
    return _record_from_dict(entries[0])
