"""Command-line front end.

    lgtrans selection-rules --l 2 --order 2 [--csv rules.csv]
    lgtrans cm-spectrum --l 2 [--Ni 6 --Mi 0 --wr-ratio 1e-4 --k-w0 40 --nf-max 12]
    lgtrans scan [--Ni 6 --Mi 0 --Nf 12 --l-min 0 --l-max 10 --wr-ratios 1e-5,1e-4,1e-3]
    lgtrans evaluate --scenario scenario.json
    lgtrans verify --suite all

Exit codes: 0 success, 1 numeric or verification failure, 2 usage or
validation error. Scans use LGTRANS_THREADS worker threads (serial when
unset).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import verify
from .errors import DomainError, NumericError
from .model import BeamConfig, CMState
from .scenario import ScenarioError, evaluate, load_scenario
from .transitions import cm_spectrum, scan, selection_table

__all__ = ["main", "build_parser", "THREADS_ENV"]

THREADS_ENV = "LGTRANS_THREADS"


class CLIError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _real(x: float) -> str:
    return format(float(x), ".17g")


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _warn(msg: str) -> None:
    print(f"lgtrans: warning: {msg}", file=sys.stderr)


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise CLIError(f"{THREADS_ENV} must be a positive integer, got {raw!r}", 2) from None
    if n < 1:
        raise CLIError(f"{THREADS_ENV} must be a positive integer, got {raw!r}", 2)
    return n


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not vals or any(not v > 0 for v in vals):
        raise argparse.ArgumentTypeError("ratios must be positive numbers")
    return vals


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


# --------------------------------------------------------------------------
# selection-rules

_SGN = {0: "any", 1: "+1", -1: "-1"}
RULE_COLUMNS = [
    "p",
    "l_prime",
    "sgn_l",
    "delta_l",
    "delta_m_sigma_-1",
    "delta_m_sigma_0",
    "delta_m_sigma_+1",
    "delta_M",
    "delta_M_expr",
    "label",
]


def rule_records(l: int, order: int) -> list[list]:
    out = []
    for row in selection_table(l, order):
        out.append(
            [
                row.p,
                row.l_prime,
                _SGN[row.sign_l],
                ";".join(str(d) for d in row.delta_l),
                *row.delta_m,
                row.delta_M,
                row.delta_M_expr,
                row.label,
            ]
        )
    return out


def cmd_selection_rules(args) -> int:
    records = rule_records(args.l, args.order)
    cells = [RULE_COLUMNS] + [[str(c) for c in r] for r in records]
    widths = [max(len(r[i]) for r in cells) for i in range(len(RULE_COLUMNS))]
    for r in cells:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    if args.csv:
        _emit(csv_text(RULE_COLUMNS, records), args.csv)
    return 0


# --------------------------------------------------------------------------
# cm-spectrum and scan

SPECTRUM_COLUMNS = ["N_f", "M_f", "l_prime", "P_cm", "P_cm_normalized"]
SCAN_COLUMNS = ["l", "wr_ratio", "l_prime", "P_cm", "P_cm_over_P_l0"]


def _check_cm_row(l: int, cm_i: CMState, n_f: int, m_f: int, lp: int, p_cm: float) -> None:
    """Re-derive the conservation laws for one emitted row.

    With the electronic factor excluded the channel fixes dm = sigma + sgn(l) l',
    so dm + dM = l + sigma holds iff dM = sgn(l)(|l| - l').
    """
    if p_cm == 0.0:
        return
    s = (l > 0) - (l < 0)
    dM = m_f - cm_i.M
    problems = []
    if dM != s * (abs(l) - lp):
        problems.append(f"dM = {dM} != sgn(l)(|l| - l') = {s * (abs(l) - lp)}")
    if abs(dM) > abs(l):
        problems.append(f"|dM| = {abs(dM)} exceeds |l| = {abs(l)}")
    if abs(m_f) > n_f or (n_f - m_f) % 2:
        problems.append(f"final state (N={n_f}, M={m_f}) does not exist")
    if (n_f - cm_i.N - (abs(l) - lp)) % 2:
        problems.append("N_f - N_i and |l| - l' differ in parity")
    if problems:
        raise CLIError(f"conservation re-check failed for l={l}, l'={lp}, N_f={n_f}: " + "; ".join(problems), 1)


def spectrum_records(l, n_i, m_i, w_ratio, k_w0, nf_max, ref_nf, order=2, ref_l=None) -> list[list]:
    """Rows of the N_f spectrum normalised to the largest P_cm at N_f = ref_nf.

    The reference is taken from winding ``ref_l`` (default ``l``) so that
    spectra for several windings can share one scale.
    """
    beam = BeamConfig(l, k_w0=k_w0)
    cm_i = CMState(n_i, m_i, w_R=w_ratio)
    rows = cm_spectrum(beam, cm_i, w_ratio, nf_max, order)
    ref_rows = rows if ref_l is None or ref_l == l else cm_spectrum(BeamConfig(ref_l, k_w0=k_w0), cm_i, w_ratio, max(nf_max, ref_nf), order)
    ref = max((r.P_cm for r in ref_rows if r.N_f == ref_nf), default=0.0)
    if ref == 0.0:
        raise CLIError(f"reference probability at N_f={ref_nf} is zero; choose another --ref-nf", 1)
    out = []
    for r in rows:
        _check_cm_row(l, cm_i, r.N_f, r.M_f, r.l_prime, r.P_cm)
        out.append([r.N_f, r.M_f, r.l_prime, _real(r.P_cm), _real(r.P_cm / ref)])
    return out


def cmd_cm_spectrum(args) -> int:
    nf_max = args.nf_max if args.nf_max is not None else args.Ni + abs(args.l) + 2
    ref_nf = args.ref_nf if args.ref_nf is not None else args.Ni
    records = spectrum_records(args.l, args.Ni, args.Mi, args.wr_ratio, args.k_w0, nf_max, ref_nf, args.order, args.ref_l)
    _emit(csv_text(SPECTRUM_COLUMNS, records), args.output)
    return 0


def scan_records(n_i, m_i, n_f, l_min, l_max, w_ratios, k_w0, order=2, workers=1, warn=_warn) -> list[list]:
    """Rows of the (l, w_R/w0) grid normalised to the l = 0 probability.

    The reference is P(l=0) for the same N_i -> N_f. An untwisted beam
    cannot change N with l' = 0 and |dM| = 0 unless N_f = N_i, so for other
    N_f that reference is zero; the elastic l = 0 value (N_f = N_i) is used
    instead and a warning is printed.
    """
    if l_min > l_max:
        raise CLIError("--l-min must not exceed --l-max", 2)
    windings = range(l_min, l_max + 1)
    rows = scan(n_i, m_i, n_f, windings, w_ratios, k_w0, order, workers)
    ref_rows = scan(n_i, m_i, n_f, [0], w_ratios, k_w0, order, 1)
    ref = {r.w_ratio: r.P_cm for r in ref_rows}
    if any(v == 0.0 for v in ref.values()):
        elastic = scan(n_i, m_i, n_i, [0], w_ratios, k_w0, order, 1)
        ref = {r.w_ratio: r.P_cm for r in elastic}
        warn(
            f"P_cm(l=0) vanishes for N_i={n_i} -> N_f={n_f}; "
            f"normalising to the elastic l=0 value (N_f={n_i}) instead"
        )
    cm_i = CMState(n_i, m_i)
    out = []
    for r in rows:
        s = (r.l > 0) - (r.l < 0)
        _check_cm_row(r.l, cm_i, n_f, m_i + s * (abs(r.l) - r.l_prime), r.l_prime, r.P_cm)
        out.append([r.l, _real(r.w_ratio), r.l_prime, _real(r.P_cm), _real(r.P_cm / ref[r.w_ratio])])
    return out


def cmd_scan(args) -> int:
    records = scan_records(
        args.Ni, args.Mi, args.Nf, args.l_min, args.l_max, args.wr_ratios, args.k_w0, args.order, _threads()
    )
    _emit(csv_text(SCAN_COLUMNS, records), args.output)
    return 0


# --------------------------------------------------------------------------
# evaluate and verify


def cmd_evaluate(args) -> int:
    try:
        sc = load_scenario(args.scenario)
    except ScenarioError as exc:
        for path, msg in exc.problems:
            print(f"lgtrans: {args.scenario}: {path}: {msg}", file=sys.stderr)
        return 2
    report = evaluate(sc)
    _emit(json.dumps(report, indent=2, sort_keys=False) + "\n", args.output)
    if not report["conservation"]["ok"]:
        print("lgtrans: conservation check reported violations", file=sys.stderr)
        return 1
    return 0


def cmd_verify(args) -> int:
    report = verify.run(args.suite, args.seed)
    _emit(json.dumps(report, indent=2) + "\n", args.output)
    return 0 if report["passed"] else 1


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lgtrans", description="LG-beam induced atomic transitions")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("selection-rules", help="selection-rule table for a winding number")
    p.add_argument("--l", type=int, required=True, help="winding number")
    p.add_argument("--order", type=int, choices=(1, 2), default=2, help="1 = dipole only, 2 = up to quadrupole")
    p.add_argument("--csv", metavar="PATH", help="also write the table as CSV")
    p.set_defaults(func=cmd_selection_rules)

    p = sub.add_parser("cm-spectrum", help="CM probability against final N (CSV)")
    p.add_argument("--Ni", type=int, default=6)
    p.add_argument("--Mi", type=int, default=0)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--wr-ratio", type=_positive, default=1e-4, help="w_R / w0")
    p.add_argument("--k-w0", type=_positive, default=40.0)
    p.add_argument("--nf-max", type=int, default=None, help="largest N_f (default Ni + |l| + 2)")
    p.add_argument("--ref-nf", type=int, default=None, help="N_f whose largest P_cm normalises the table (default Ni)")
    p.add_argument("--ref-l", type=int, default=None, help="winding whose spectrum supplies the reference (default --l)")
    p.add_argument("--order", type=int, choices=(1, 2), default=2)
    p.add_argument("--output", "-o", metavar="PATH", default=None)
    p.set_defaults(func=cmd_cm_spectrum)

    p = sub.add_parser("scan", help="CM probability over winding number and w_R/w0 (CSV)")
    p.add_argument("--Ni", type=int, default=6)
    p.add_argument("--Mi", type=int, default=0)
    p.add_argument("--Nf", type=int, default=12)
    p.add_argument("--l-min", type=int, default=0)
    p.add_argument("--l-max", type=int, default=10)
    p.add_argument("--wr-ratios", type=_float_list, default=[1e-5, 1e-4, 1e-3], help="comma-separated w_R/w0 values")
    p.add_argument("--k-w0", type=_positive, default=40.0)
    p.add_argument("--order", type=int, choices=(1, 2), default=2)
    p.add_argument("--output", "-o", metavar="PATH", default=None)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("evaluate", help="full matrix elements for a JSON scenario")
    p.add_argument("--scenario", required=True, metavar="PATH")
    p.add_argument("--output", "-o", metavar="PATH", default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("verify", help="oracle cross-checks, JSON report")
    p.add_argument("--suite", choices=("all", *verify.SUITES), default="all")
    p.add_argument("--seed", type=int, default=12345)
    p.add_argument("--output", "-o", metavar="PATH", default=None)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"lgtrans: {exc}", file=sys.stderr)
        return exc.code
    except DomainError as exc:
        print(f"lgtrans: invalid input: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"lgtrans: numeric failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
