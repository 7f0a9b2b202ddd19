#!/usr/bin/env python3
"""Build the two public benchmark CSVs used by the acceptance suite.

wdbc.csv   Wisconsin Diagnostic Breast Cancer, 569 x 30, target `diagnosis` (B/M).
           Canonical source: https://archive.ics.uci.edu/dataset/17
           Local source: the copy bundled with scikit-learn.
heart.csv  Cleveland heart disease, 303 x 13, target `target` (0/1), "?" marks
           missing values as in processed.cleveland.data.
           Canonical source: https://archive.ics.uci.edu/dataset/45
           Local source: Orange/datasets/heart_disease.tab from the orange3 wheel
           (fetched with `pip download` when not cached).

Both outputs are checked against pinned SHA-256 digests.
"""

import argparse
import csv
import glob
import hashlib
import io
import os
import subprocess
import sys
import tempfile
import zipfile

PINNED_SHA256 = {
    "wdbc.csv": "e625156c38943b03f749477157b8c1e3aa0e564c4b4705abeadfdc4ace9e2acf",
    "heart.csv": "ed78f1a7b8d25d5d368a835ee6d45eca7eea8a78483760971070a30b6e2728e9",
}

ORANGE_VERSION = "3.39.0"

WDBC_FEATURES = [
    f"{name}_{stat}"
    for stat in ("mean", "se", "worst")
    for name in ("radius", "texture", "perimeter", "area", "smoothness",
                 "compactness", "concavity", "concave_points", "symmetry",
                 "fractal_dimension")
]

HEART_COLUMNS = ["age", "sex", "cp", "trestbps", "chol", "fbs", "restecg",
                 "thalach", "exang", "oldpeak", "slope", "ca", "thal", "target"]

# Orange labels -> UCI processed.cleveland.data codes.
HEART_CODES = {
    1: {"male": "1", "female": "0"},
    2: {"typical ang": "1", "atypical ang": "2", "non-anginal": "3", "asymptomatic": "4"},
    6: {"normal": "0", "ST-T abnormal": "1", "left vent hypertrophy": "2"},
    10: {"upsloping": "1", "flat": "2", "downsloping": "3"},
    12: {"normal": "3", "fixed defect": "6", "reversable defect": "7"},
}


def render(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def build_wdbc():
    import sklearn.datasets
    path = os.path.join(os.path.dirname(sklearn.datasets.__file__), "data", "breast_cancer.csv")
    with open(path, newline="") as f:
        lines = list(csv.reader(f))
    n, d = int(lines[0][0]), int(lines[0][1])
    rows = [WDBC_FEATURES + ["diagnosis"]]
    for rec in lines[1:1 + n]:
        # bundled copy encodes malignant=0, benign=1
        rows.append(rec[:d] + ["M" if rec[d] == "0" else "B"])
    assert len(rows) == n + 1 and d == 30
    return render(rows)


def orange_wheel(cache_dir):
    found = glob.glob(os.path.join(cache_dir, f"orange3-{ORANGE_VERSION}-*.whl"))
    if found:
        return found[0]
    subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps", "-q",
                    "-d", cache_dir, f"orange3=={ORANGE_VERSION}"], check=True)
    found = glob.glob(os.path.join(cache_dir, f"orange3-{ORANGE_VERSION}-*.whl"))
    if not found:
        sys.exit("orange3 wheel not found after download")
    return found[0]


def build_heart(cache_dir):
    with zipfile.ZipFile(orange_wheel(cache_dir)) as z:
        text = z.read("Orange/datasets/heart_disease.tab").decode("utf-8")
    lines = text.splitlines()[3:]  # name, type and flag header rows
    rows = [HEART_COLUMNS]
    for line in lines:
        if not line.strip():
            continue
        fields = line.split("\t")
        out = []
        for i, v in enumerate(fields):
            if v in ("?", ""):
                out.append("?")
            elif i in HEART_CODES:
                out.append(HEART_CODES[i][v])
            else:
                out.append(v)
        rows.append(out)
    assert len(rows) == 304
    return render(rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    ap.add_argument("--cache", default=os.path.join(tempfile.gettempdir(), "quantbench-wheels"))
    ap.add_argument("--print-digests", action="store_true")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    os.makedirs(args.cache, exist_ok=True)

    for name, build in (("wdbc.csv", build_wdbc), ("heart.csv", lambda: build_heart(args.cache))):
        target = os.path.join(args.out, name)
        if os.path.exists(target):
            with open(target, "rb") as f:
                data = f.read()
        else:
            data = build().encode("utf-8")
        digest = hashlib.sha256(data).hexdigest()
        if args.print_digests:
            print(name, digest)
        elif PINNED_SHA256[name] != digest:
            sys.exit(f"{name}: checksum mismatch ({digest})")
        if not os.path.exists(target):
            with open(target, "wb") as f:
                f.write(data)
        print(f"{target}: ok")


if __name__ == "__main__":
    main()
