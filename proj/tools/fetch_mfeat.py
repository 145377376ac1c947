#!/usr/bin/env python3
"""Fetch the UCI "Multiple Features" (mfeat) digit dataset.

Writes the six views in the original UCI layout (2000 whitespace-separated
rows per file, no header, no label column) into the target directory.

The UCI archive is tried first. If it is unreachable, the copy bundled in the
mvlearn wheel on PyPI is used instead; that copy is CSV with a header row and
a trailing label column, both of which are stripped.
"""

import argparse
import csv
import io
import os
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

VIEWS = ["pix", "fou", "kar", "fac", "zer", "mor"]
UCI_URL = "https://archive.ics.uci.edu/static/public/72/multiple+features.zip"


def from_uci(out_dir):
    with urllib.request.urlopen(UCI_URL, timeout=30) as resp:
        payload = resp.read()
    with zipfile.ZipFile(io.BytesIO(payload)) as z:
        for view in VIEWS:
            name = next(n for n in z.namelist() if n.endswith("mfeat-" + view))
            with open(os.path.join(out_dir, "mfeat-" + view), "wb") as f:
                f.write(z.read(name))


def from_mvlearn(out_dir):
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.check_call(
            [sys.executable, "-m", "pip", "download", "mvlearn==0.5.0",
             "--no-deps", "-q", "-d", tmp])
        wheel = next(os.path.join(tmp, f) for f in os.listdir(tmp)
                     if f.endswith(".whl"))
        with zipfile.ZipFile(wheel) as z:
            for view in VIEWS:
                member = "mvlearn/datasets/UCImultifeature/mfeat-%s.csv" % view
                text = z.read(member).decode("ascii")
                rows = list(csv.reader(io.StringIO(text)))[1:]
                for i, row in enumerate(rows):
                    if int(float(row[-1])) != i // 200:
                        raise RuntimeError("unexpected label order in " + member)
                with open(os.path.join(out_dir, "mfeat-" + view), "w") as f:
                    for row in rows:
                        f.write(" ".join(row[:-1]) + "\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("out_dir", nargs="?", default="data/mfeat")
    args = parser.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)
    try:
        from_uci(args.out_dir)
        print("fetched from UCI")
    except Exception as exc:  # network blocked, DNS failure, ...
        print("UCI unavailable (%s); using mvlearn wheel" % exc, file=sys.stderr)
        from_mvlearn(args.out_dir)
        print("fetched from mvlearn wheel")


if __name__ == "__main__":
    main()
