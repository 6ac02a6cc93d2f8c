#!/usr/bin/env python3
"""Fixed-probability echo classifier speaking the subprocess protocol.

Emits {"classes": 2} on startup, then answers every request
{"id": ..., "texts": [...]} with one probability row per text. Useful
for wiring tests and as a template for real model servers.

  --probs P0,P1   the row returned for every text (default 0.3,0.7)
  --drift D       added to the first entry of each row, so row sums can
                  deliberately miss 1.0 (default 0)
"""

import argparse
import json
import sys


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--probs", default="0.3,0.7")
    parser.add_argument("--drift", type=float, default=0.0)
    args = parser.parse_args()

    row = [float(p) for p in args.probs.split(",")]
    row[0] += args.drift
    sys.stdout.write(json.dumps({"classes": len(row)}) + "\n")
    sys.stdout.flush()

    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        request = json.loads(line)
        response = {"id": request["id"], "probs": [list(row) for _ in request["texts"]]}
        sys.stdout.write(json.dumps(response) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
