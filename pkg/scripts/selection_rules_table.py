"""Selection-rule table for l = +2 and -2, merged into the four distinct rows."""

import argparse
import csv
import sys

from lgtrans.cli import RULE_COLUMNS, rule_records


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--l", type=int, default=2, help="|l|; both signs are tabulated")
    ap.add_argument("--order", type=int, choices=(1, 2), default=2)
    ap.add_argument("--output", "-o", default=None)
    args = ap.parse_args(argv)

    rows, seen = [], set()
    for l in (abs(args.l), -abs(args.l)):
        for rec in rule_records(l, args.order):
            key = tuple(str(c) for c in rec[:7]) + (rec[8],)
            if key not in seen:
                seen.add(key)
                rows.append(rec)
    out = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    w = csv.writer(out, lineterminator="\n")
    # delta_M is dropped: its value depends on the sign that produced the row
    cols = [c for c in RULE_COLUMNS if c != "delta_M"]
    w.writerow(cols)
    for r in rows:
        w.writerow([v for c, v in zip(RULE_COLUMNS, r) if c != "delta_M"])
    if args.output:
        out.close()


if __name__ == "__main__":
    main()
