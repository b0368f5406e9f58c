"""Product lattices with optimal per-component scaling.

Concatenating scaled components a_1 L_1 x ... x a_k L_k orthogonally is
best when a_i is proportional to 1/(sqrt(G_i) V_i^(1/n_i)), where G_i and
V_i are the component NSM and volume and n_i its dimension; the resulting
product then has NSM equal to prod G_i^(n_i / n). The overall constant is
fixed by anchoring the largest component at a = 1 (ties: first listed).
"""

from dataclasses import dataclass

import numpy as np

from .lattices import GeneratorMatrix, LatticeRecord, catalog_get, direct_sum, scale


@dataclass(frozen=True)
class FusionSpec:
    """Ordered scaled components of a product lattice."""

    components: tuple          # LatticeRecord, multiplicity expanded
    scalings: tuple            # one positive float per component

    def __post_init__(self):
        if len(self.components) != len(self.scalings):
            raise ValueError("one scaling per component required")
        if any(a <= 0 for a in self.scalings):
            raise ValueError("scalings must be strictly positive")

    @property
    def total_dim(self) -> int:
        return sum(rec.dim for rec in self.components)

    @property
    def blocks(self):
        """(offset, size) per component in the product coordinates."""
        out = []
        off = 0
        for rec in self.components:
            out.append((off, rec.dim))
            off += rec.dim
        return tuple(out)


def parse_components(spec: str, catalog_path=None):
    """Parse 'NAME' or 'NAME*m' comma-separated component lists.

    Example: "K12,Z" or "L16,A2*2".
    """
    records = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            raise ValueError(f"empty component in {spec!r}")
        if "*" in part:
            name, mult = part.split("*", 1)
            mult = int(mult)
            if mult < 1:
                raise ValueError(f"multiplicity must be >= 1 in {part!r}")
        else:
            name, mult = part, 1
        rec = catalog_get(name.strip(), catalog_path)
        records.extend([rec] * mult)
    if len(records) > 8:
        raise ValueError("products of more than 8 components are not supported")
    return records


def optimal_scaling(components) -> list:
    """Per-component scale factors minimizing the product NSM.

    a_i = C / (sqrt(G_i) * V_i^(1/n_i)), anchored so the largest-dimension
    component keeps a = 1.
    """
    raw = []
    for rec in components:
        if rec.reference_nsm is None:
            raise ValueError(f"{rec.name} has no reference NSM")
        raw.append(1.0 / (np.sqrt(rec.reference_nsm)
                          * rec.reference_volume ** (1.0 / rec.dim)))
    anchor = max(range(len(components)), key=lambda i: components[i].dim)
    return [r / raw[anchor] for r in raw]


def predicted_product_nsm(components) -> float:
    """NSM of the optimally scaled orthogonal product: prod G_i^(n_i/n)."""
    n = sum(rec.dim for rec in components)
    log_nsm = 0.0
    for rec in components:
        if rec.reference_nsm is None:
            raise ValueError(f"{rec.name} has no reference NSM")
        log_nsm += rec.dim / n * np.log(rec.reference_nsm)
    return float(np.exp(log_nsm))


def optimal_spec(components) -> FusionSpec:
    return FusionSpec(components=tuple(components),
                      scalings=tuple(optimal_scaling(components)))


def build_product(spec: FusionSpec) -> GeneratorMatrix:
    """Block-diagonal generator of the scaled product."""
    out = None
    for rec, a in zip(spec.components, spec.scalings):
        g = scale(rec.generator, a) if a != 1.0 else rec.generator
        out = g if out is None else direct_sum(out, g)
    return out


def product_record(components, name=None) -> LatticeRecord:
    """Catalog-style record for the optimally scaled product."""
    spec = optimal_spec(components)
    G = build_product(spec)
    from .lattices import volume
    return LatticeRecord(
        name=name or "x".join(rec.name for rec in components),
        generator=G,
        reference_volume=volume(G),
        reference_nsm=predicted_product_nsm(components),
        comment="optimally scaled orthogonal product",
    )
