"""CM probability against N_f for l = 2 and l = 3 (N_i = 6, M_i = 0, w_R/w0 = 1e-4).

Writes one CSV per winding number into the output directory. Both panels
share one scale: the largest l = 2 probability at N_f = N_i.
"""

import argparse
from pathlib import Path

from lgtrans.cli import SPECTRUM_COLUMNS, csv_text, spectrum_records


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out")
    ap.add_argument("--windings", default="2,3")
    ap.add_argument("--Ni", type=int, default=6)
    ap.add_argument("--Mi", type=int, default=0)
    ap.add_argument("--wr-ratio", type=float, default=1e-4)
    ap.add_argument("--k-w0", type=float, default=40.0)
    ap.add_argument("--ref-l", type=int, default=2)
    args = ap.parse_args(argv)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for l in (int(t) for t in args.windings.split(",")):
        nf_max = args.Ni + abs(l) + 2
        rows = spectrum_records(l, args.Ni, args.Mi, args.wr_ratio, args.k_w0, nf_max, args.Ni, ref_l=args.ref_l)
        path = out / f"nf_spectrum_l{l}.csv"
        path.write_text(csv_text(SPECTRUM_COLUMNS, rows), encoding="utf-8", newline="")
        nonzero = [(r[0], r[2]) for r in rows if float(r[3]) > 0]
        print(f"{path}: nonzero (N_f, l') = {nonzero}")


if __name__ == "__main__":
    main()
