#!/usr/bin/env python3
"""Regenerate src/latquant/data/catalog.json from the exact constructions.

Reference NSM values are measured by Monte Carlo with the sample count and
seed recorded in the file header; Z1 and A1 carry the exact value 1/12.
"""

import json
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

import numpy as np  # noqa: E402

from latquant import constructions as C  # noqa: E402
from latquant.lattices import record_to_dict  # noqa: E402
from latquant.nsm import estimate_nsm  # noqa: E402

NSM_SAMPLES = 1_000_000
NSM_SEED = 20240517

NAMES = (
    ["Z1"]
    + [f"A{n}" for n in range(1, 9)]
    + [f"A{n}s" for n in range(1, 9)]
    + [f"D{n}" for n in range(3, 9)]
    + [f"D{n}s" for n in range(3, 9)]
    + ["E6", "E6s", "E7", "E8", "K12", "L16"]
)

COMMENTS = {
    "K12": "Coxeter-Todd lattice (hexacode construction)",
    "L16": "Barnes-Wall lattice (RM(1,4) construction, rescaled)",
}

EXACT_NSM = {"Z1": 1.0 / 12.0, "A1": 1.0 / 12.0, "A1s": 1.0 / 12.0}


def main():
    out_path = os.path.join(
        os.path.dirname(__file__), "..", "src", "latquant", "data", "catalog.json"
    )
    os.makedirs(os.path.dirname(out_path), exist_ok=True)
    entries = []
    for name in NAMES:
        t0 = time.time()
        rec = C.build_record(name, comment=COMMENTS.get(name, ""))
        if name in EXACT_NSM:
            nsm = EXACT_NSM[name]
            note = "exact"
        else:
            est = estimate_nsm(rec.generator, NSM_SAMPLES, NSM_SEED)
            nsm = est.mean
            note = f"mc sigma {est.std_of_mean:.2e}"
        entry = record_to_dict(rec)
        entry["reference_nsm"] = nsm
        entries.append(entry)
        print(f"{name:5s} dim {rec.dim:2d} vol {rec.reference_volume:<12.10g} "
              f"nsm {nsm:.6f} ({note}) [{time.time()-t0:.1f}s]")

    payload = {
        "format": "latquant-catalog",
        "version": 1,
        "nsm_samples": NSM_SAMPLES,
        "nsm_seed": NSM_SEED,
        "lattices": entries,
    }
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    print(f"wrote {out_path} ({len(entries)} records)")


if __name__ == "__main__":
    main()
