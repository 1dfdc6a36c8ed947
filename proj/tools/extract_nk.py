#!/usr/bin/env python3
"""Write bundled n,k tables from the refractiveindex.info database.

The database ships as ``database.npz`` inside the ``refidx`` wheel
(refidx 1.3.0, data released CC0 by refractiveindex.info).

    python3 tools/extract_nk.py path/to/database.npz data/nk
"""
import argparse
import pathlib

import numpy as np

TABLES = [
    ("Si", "Franta-20C", "Si_Franta.csv",
     "float-zone crystalline Si at 293 K",
     "D. Franta et al., Appl. Surf. Sci. 421, 405-419 (2017)"),
    ("SiO2", "Franta", "SiO2_Franta.csv",
     "fused silica",
     "D. Franta et al., Proc. SPIE 9890, 989002 (2016)"),
]


def write_table(db, material, dataset, filename, description, reference, outdir):
    data = db["main"][material][dataset]["DATA"]
    wl = np.asarray(data["wavelengths"], dtype=float)
    idx = np.asarray(data["index"], dtype=complex)
    order = np.argsort(wl)
    wl, idx = wl[order], idx[order]
    keep = np.concatenate(([True], np.diff(wl) > 0))
    wl, idx = wl[keep], idx[keep]
    path = pathlib.Path(outdir) / filename
    with open(path, "w") as f:
        f.write(f"# {material}: {description}\n")
        f.write(f"# source: refractiveindex.info database, main/{material}/{dataset} (CC0)\n")
        f.write(f"# reference: {reference}\n")
        f.write(f"# extracted with tools/extract_nk.py from refidx 1.3.0\n")
        f.write("# columns: wavelength_um,n,k\n")
        for w, z in zip(wl, idx):
            f.write(f"{w:.9g},{z.real:.9g},{max(z.imag, 0.0):.9g}\n")
    print(f"{path}: {len(wl)} rows, {wl[0]:.4g}-{wl[-1]:.4g} um")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("database")
    ap.add_argument("outdir")
    args = ap.parse_args()
    db = np.load(args.database, allow_pickle=True)["database"].item()
    for entry in TABLES:
        write_table(db, *entry, args.outdir)


if __name__ == "__main__":
    main()
