#!/usr/bin/env python3
"""Experiment: extract the late-term prefactor constant from the exact series.

Builds the table, prints the per-order estimates and the Richardson
extrapolant ladder, and writes the JSON report plus a (n, lambda_n) CSV.

    python scripts/run_lambda_extrapolation.py --n-max 30 --order 3
"""

import argparse
import json
from pathlib import Path

from fkdv import build_series, singulant_report
from fkdv.late_terms import lambda_csv_rows, report_to_json


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-max", type=int, default=30)
    ap.add_argument("--order", type=int, default=3)
    ap.add_argument("--out-dir", default="out")
    args = ap.parse_args()

    table = build_series(args.n_max)
    report = singulant_report(table, order=args.order)

    print("n    lambda_n (raw)   lambda_n (sign-aligned)")
    for n, (raw, ali) in enumerate(zip(report.lambda_sequence,
                                       report.lambda_aligned)):
        print(f"{n:2d}  {raw:+13.6f}  {ali:+13.6f}")
    print("\nRichardson ladder (order: estimate):")
    for k, est in enumerate(report.lambda_extrapolants):
        print(f"  {k}: {est:+.6f}")
    print(f"\nlambda_final = {report.lambda_final:.6f} "
          f"+/- {report.lambda_error:.2e}")
    print(f"divergence exponent beta = {report.beta_selected} "
          f"(fit slopes {dict((b, round(s, 3)) for b, s in report.beta_slopes.items())})")

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "lambda_report.json").write_text(
        json.dumps(report_to_json(report, table), indent=1, sort_keys=True))
    with open(out / "lambda_sequence.csv", "w") as fh:
        fh.write("n,lambda_n\n")
        for n, v in lambda_csv_rows(report):
            fh.write(f"{n},{v!r}\n")
    print(f"\nwrote {out / 'lambda_report.json'} and {out / 'lambda_sequence.csv'}")


if __name__ == "__main__":
    main()
