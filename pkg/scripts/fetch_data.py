#!/usr/bin/env python3
"""Download and convert the real benchmark datasets used by the acceptance
suite into data/*.libsvm. Needs general network access (UCI and the LIBSVM
dataset site); run on a networked machine and copy the files over if the
test environment is offline.

  mushroom  UCI agaricus-lepiota: 22 categorical columns, ordinal-encoded by
            alphabet position (missing '?' -> 0, i.e. omitted); edible -> +1.
  yeast     UCI yeast localization, binarized to the two largest classes
            (CYT -> +1, NUC -> -1), 8 numeric features.
  w1a       LIBSVM binary w1a training file, used as-is.
"""

import sys
import urllib.request
from pathlib import Path

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"
LIBSVM = "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary"

OUT = Path(__file__).resolve().parent.parent / "data"


def fetch(url: str) -> str:
    print(f"fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as resp:
        return resp.read().decode("utf-8")


def convert_mushroom(raw: str) -> str:
    lines = []
    for row in raw.splitlines():
        if not row.strip():
            continue
        cells = row.split(",")
        label = "+1" if cells[0] == "e" else "-1"
        feats = []
        for j, c in enumerate(cells[1:], start=1):
            if c == "?":
                continue
            feats.append(f"{j}:{ord(c) - ord('a') + 1}")
        lines.append(label + " " + " ".join(feats))
    return "\n".join(lines) + "\n"


def convert_yeast(raw: str) -> str:
    lines = []
    for row in raw.splitlines():
        parts = row.split()
        if len(parts) != 10:
            continue
        cls = parts[-1]
        if cls not in ("CYT", "NUC"):
            continue
        label = "+1" if cls == "CYT" else "-1"
        feats = [f"{j}:{float(v)!r}" for j, v in enumerate(parts[1:9], start=1)
                 if float(v) != 0.0]
        lines.append(label + " " + " ".join(feats))
    return "\n".join(lines) + "\n"


def main() -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    jobs = [
        ("mushroom", f"{UCI}/mushroom/agaricus-lepiota.data", convert_mushroom),
        ("yeast", f"{UCI}/yeast/yeast.data", convert_yeast),
        ("w1a", f"{LIBSVM}/w1a", lambda raw: raw if raw.endswith("\n") else raw + "\n"),
    ]
    failures = 0
    for name, url, convert in jobs:
        target = OUT / f"{name}.libsvm"
        if target.exists():
            print(f"{target} already present, skipping")
            continue
        try:
            target.write_text(convert(fetch(url)), encoding="utf-8", newline="\n")
            print(f"wrote {target}")
        except Exception as exc:  # noqa: BLE001 - report and continue
            failures += 1
            print(f"FAILED {name}: {exc}", file=sys.stderr)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
