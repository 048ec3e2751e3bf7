#!/usr/bin/env python3
"""Materialize the benchmark CSVs under data/ from datasets bundled in PyPI wheels.

Sources:
  zoo.csv        Orange3 wheel, Orange/datasets/zoo.tab (101 x 16, 7 classes)
  glass.csv      keel-ds wheel, rebuilt from the one-vs-rest glass{0,2,4,5,6}
                 files which share row order; rows positive in none are class 2
                 (214 x 9, 6 classes)
  pendigits.csv  keel-ds wheel, penbased.dat (10992 x 16, 10 classes)
  letter.csv     keel-ds wheel, letter.dat (20000 x 16, 26 classes)

Every CSV has a header row and the class label in the last column named "class".
"""
import argparse
import csv
import glob
import io
import subprocess
import sys
import tempfile
import zipfile
from pathlib import Path


def download(pkg: str, dest: Path) -> Path:
    subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps", "-q",
                    "-d", str(dest), pkg], check=True)
    stem = pkg.split("==")[0].replace("-", "_").lower()
    hits = [p for p in glob.glob(str(dest / "*.whl")) if Path(p).name.lower().startswith(stem)]
    if not hits:
        raise SystemExit(f"no wheel for {pkg}")
    return Path(hits[0])


def keel_rows(z: zipfile.ZipFile, member: str):
    text = z.read(member).decode()
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        rows.append([c.strip() for c in line.split(",")])
    return rows


def write_csv(path: Path, header, rows):
    with path.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def zoo(wheel: Path, out: Path):
    z = zipfile.ZipFile(wheel)
    lines = z.read("Orange/datasets/zoo.tab").decode().splitlines()
    header = lines[0].split("\t")
    rows = [l.split("\t") for l in lines[3:] if l.strip()]
    # drop the animal name column
    write_csv(out / "zoo.csv", header[1:-1] + ["class"], [r[1:] for r in rows])


def glass(z: zipfile.ZipFile, out: Path):
    base = "keel_ds/data/imbalanced/raw/"
    # KEEL glassK is "class K+1 vs rest" over UCI glass types {1,2,3,5,6,7}
    variants = {"glass0": "1", "glass1": "2", "glass4": "5", "glass5": "6", "glass6": "7"}
    tables = {k: keel_rows(z, base + k + ".dat") for k in variants}
    ref = tables["glass0"]
    rows = []
    for i, r in enumerate(ref):
        feats = r[:-1]
        label = "3"
        for k, cls in variants.items():
            other = tables[k][i]
            if other[:-1] != feats:
                raise SystemExit("glass variants disagree on row order")
            if other[-1] == "positive":
                label = cls
        rows.append(feats + [label])
    header = ["RI", "Na", "Mg", "Al", "Si", "K", "Ca", "Ba", "Fe", "class"]
    write_csv(out / "glass.csv", header, rows)


def keel_balanced(z: zipfile.ZipFile, name: str, out: Path, target: str):
    rows = keel_rows(z, f"keel_ds/data/balanced/raw/{name}.dat")
    d = len(rows[0]) - 1
    write_csv(out / target, [f"f{i}" for i in range(d)] + ["class"], rows)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        zoo(download("Orange3", tmp), out)
        keel = zipfile.ZipFile(download("keel-ds", tmp))
        glass(keel, out)
        keel_balanced(keel, "penbased", out, "pendigits.csv")
        keel_balanced(keel, "letter", out, "letter.csv")


if __name__ == "__main__":
    main()
