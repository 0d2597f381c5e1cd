"""Independent oracle for the outer measure of C*C at depths 0..8.

Uses only integers: the level-k pieces of C are [i, i+1] / 3^k for the
integers i whose base-3 digits are all 0 or 2.  Products of two pieces are
[i*j, (i+1)*(j+1)] / 9^k, merged by a plain sort-and-sweep.

Usage: python scripts/cc_measure_oracle.py > src/cantorkit/data/cc_measure_golden.json
"""

import json
import sys
from fractions import Fraction


def left_ends(k):
    ends = [0]
    for _ in range(k):
        ends = [3 * e + d for e in ends for d in (0, 2)]
    return ends


def measure(k):
    ends = left_ends(k)
    boxes = sorted((i * j, (i + 1) * (j + 1)) for i in ends for j in ends)
    total, cur_lo, cur_hi = 0, None, None
    for lo, hi in boxes:
        if cur_hi is None or lo > cur_hi:
            if cur_hi is not None:
                total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        elif hi > cur_hi:
            cur_hi = hi
    total += cur_hi - cur_lo
    return Fraction(total, 9**k)


def main(max_depth=8):
    out = {}
    for k in range(max_depth + 1):
        m = measure(k)
        out[str(k)] = f"{m.numerator}/{m.denominator}" if m.denominator != 1 else str(m.numerator)
        print(f"depth {k}: {float(m):.8f}", file=sys.stderr)
    doc = {"description": "outer measure of C*C from level-k piece products", "measures": out}
    print(json.dumps(doc, indent=2, sort_keys=True))


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 8)
