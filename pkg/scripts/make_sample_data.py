#!/usr/bin/env python3
"""Regenerate the bundled sample dataset under data/.

The files are synthetic but deterministic, so rerunning this script
reproduces them byte for byte.
"""

import argparse
from pathlib import Path

from xprob import sampledata


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dir", default=Path(__file__).resolve().parent.parent / "data")
    parser.add_argument("--corpus-lines", type=int, default=2000)
    parser.add_argument("--train-lines", type=int, default=2000)
    parser.add_argument("--test-lines", type=int, default=400)
    args = parser.parse_args()

    out = Path(args.dir)
    out.mkdir(parents=True, exist_ok=True)
    sampledata.write_corpus(out / "sample_corpus.txt", args.corpus_lines, seed=11)
    sampledata.write_labeled(out / "sample_train.tsv", args.train_lines, seed=22)
    sampledata.write_labeled(out / "sample_test.tsv", args.test_lines, seed=33)
    print(f"wrote sample data to {out}")


if __name__ == "__main__":
    main()
