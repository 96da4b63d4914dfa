"""Ball sizes of the catalog groups against their counting oracles.

    python scripts/growth_table.py [--max-len 6]

The octagon group is compared with the growth series of the genus-2 surface
group, the Schottky demo with the free-group count.  Prints one CSV row per
(group, L): group, L, entries, expected, merges, seconds.
"""

import argparse
import csv
import sys
import time

from horolab.groups import catalog, enumerate_ball, reduced_word_count


def surface_group_balls(n: int) -> list[int]:
    """Ball sizes from the series (1+2z+2z^2+2z^3+z^4) / (1-6z-6z^2-6z^3+z^4)."""
    num = [1, 2, 2, 2, 1]
    den = [1, -6, -6, -6, 1]
    spheres = []
    for k in range(n + 1):
        v = num[k] if k < len(num) else 0
        v -= sum(den[j] * spheres[k - j] for j in range(1, min(k, 4) + 1))
        spheres.append(v)
    out, total = [], 0
    for s in spheres:
        total += s
        out.append(total)
    return out


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-len", type=int, default=6)
    args = ap.parse_args()
    oracle = surface_group_balls(args.max_len)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["group", "L", "entries", "expected", "merges", "seconds"])
    for name in ("octagon", "schottky"):
        spec = catalog(name)
        for L in range(args.max_len + 1):
            t0 = time.perf_counter()
            ball = enumerate_ball(spec, L)
            expected = oracle[L] if name == "octagon" else reduced_word_count(spec.rank, L)
            w.writerow([name, L, len(ball), expected, ball.merges, f"{time.perf_counter() - t0:.3f}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
