#!/usr/bin/env python3
# Copyright 2026 The AOSOBoost Authors. All Rights Reserved.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#     http://www.apache.org/licenses/LICENSE-2.0
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Extracts the Optdigits and Pendigits benchmark splits into data/.

The UCI files are redistributed inside the `keel-ds` wheel as single
concatenated tables. Optdigits keeps the original order (3823 training rows
followed by the 1797 test rows); Pendigits is shuffled, so the first 7494 rows
become the training split and the remaining 3498 the test split.

Usage: tools/prepare_data.py [--wheel PATH] [--out DIR]
"""
import argparse
import glob
import os
import subprocess
import sys
import tempfile
import zipfile

SPLITS = {
    "optdigits": ("keel_ds/data/balanced/raw/optdigits.dat", 3823, 1797),
    "pendigits": ("keel_ds/data/balanced/raw/penbased.dat", 7494, 3498),
}


def fetch_wheel(tmp):
    subprocess.check_call([sys.executable, "-m", "pip", "download", "--no-deps",
                           "keel-ds==0.2.5", "-d", tmp])
    return glob.glob(os.path.join(tmp, "keel_ds-*.whl"))[0]


def rows(text):
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        yield ",".join(tok.strip() for tok in line.split(","))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--wheel")
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = ap.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        wheel = args.wheel or fetch_wheel(tmp)
        with zipfile.ZipFile(wheel) as z:
            for name, (member, n_train, n_test) in SPLITS.items():
                table = list(rows(z.read(member).decode()))
                if len(table) != n_train + n_test:
                    sys.exit(f"{name}: expected {n_train + n_test} rows, got {len(table)}")
                os.makedirs(args.out, exist_ok=True)
                for split, part in (("train", table[:n_train]), ("test", table[n_train:])):
                    path = os.path.join(args.out, f"{name}.{split}.csv")
                    with open(path, "w") as f:
                        f.write("\n".join(part) + "\n")
                    print(f"wrote {path} ({len(part)} rows)")


if __name__ == "__main__":
    main()
