#!/usr/bin/env python3
"""Experiment: watch the Stokes multiplier switch on across the Stokes line.

For each epsilon, integrates the multiplier forcing through theta = -pi/2 and
writes (eta, S) samples next to the closed-form error-function profile; the
jump is compared against Lam pi e^{3 i pi/2} / eps^2.

    python scripts/run_stokes_smoothing.py --epsilon 0.1 0.05 0.025
"""

import argparse
import csv
from pathlib import Path

from fkdv import frame_for, integrate_multiplier
from fkdv.stokes import profile_csv_rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--epsilon", type=float, nargs="+",
                    default=[0.1, 0.05, 0.025])
    ap.add_argument("--lambda-const", type=float, default=-19.97)
    ap.add_argument("--out-dir", default="out")
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    print("eps      jump (numeric)        jump (closed form)    ratio")
    for eps in args.epsilon:
        frame = frame_for(eps, lambda_const=args.lambda_const)
        profile = integrate_multiplier(frame)
        ratio = abs(profile.jump_numeric / profile.jump_closed_form)
        print(f"{eps:<7g}  {profile.jump_numeric:.6e}  "
              f"{profile.jump_closed_form:.6e}  {ratio:.6f}")
        path = out / f"stokes_profile_eps{eps:g}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["eta", "re_S", "im_S", "re_S_closed", "im_S_closed"])
            for row in profile_csv_rows(profile, frame):
                writer.writerow([repr(v) for v in row])
        print(f"         wrote {path}")


if __name__ == "__main__":
    main()
