"""P_cm for N_i = 6 -> N_f = 12 over l = 0..10 and three w_R/w0 values.

Also prints the log-log slope per (l, l') so the 2(|l| - l') scaling can be
read off directly.
"""

import argparse
import os
from pathlib import Path

import numpy as np

from lgtrans.cli import SCAN_COLUMNS, THREADS_ENV, csv_text, scan_records


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out")
    ap.add_argument("--l-max", type=int, default=10)
    ap.add_argument("--wr-ratios", default="1e-5,1e-4,1e-3")
    ap.add_argument("--k-w0", type=float, default=40.0)
    args = ap.parse_args(argv)

    ratios = [float(t) for t in args.wr_ratios.split(",")]
    workers = int(os.environ.get(THREADS_ENV, "1"))
    rows = scan_records(6, 0, 12, 0, args.l_max, ratios, args.k_w0, workers=workers)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "winding_scan.csv"
    path.write_text(csv_text(SCAN_COLUMNS, rows), encoding="utf-8", newline="")
    print(path)

    series = {}
    for l, w, lp, p, _ in rows:
        if float(p) > 0:
            series.setdefault((l, lp), []).append((float(w), float(p)))
    for (l, lp), pts in sorted(series.items()):
        if len(pts) > 1:
            x, y = np.log10([a for a, _ in pts]), np.log10([b for _, b in pts])
            print(f"l={l:2d} l'={lp}: slope {np.polyfit(x, y, 1)[0]:.6f} (expected {2 * (l - lp)})")


if __name__ == "__main__":
    main()
