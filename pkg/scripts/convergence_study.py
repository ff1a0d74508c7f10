#!/usr/bin/env python3
"""Stability sweep: realize a perturbation family shrinking like 1/n and
tabulate how slices, thickness data, and shape measures follow the base.

    python scripts/convergence_study.py --family dilation --n-list 8,16,32,64
    python scripts/convergence_study.py --family fourier --mode-k 3 --t 0.03
"""

import argparse
import csv
import sys

from gnplab.convergence import COLUMNS, DomainSequence, full_convergence_run
from gnplab.geometry import constant_profile, disc_body, make_domain
from gnplab.solver import SourceSpec


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", choices=("dilation", "fourier"),
                    default="dilation")
    ap.add_argument("--n-list", default="8,16,32,64")
    ap.add_argument("--t", type=float, default=0.04)
    ap.add_argument("--grid-h", type=float, default=1.0 / 64)
    ap.add_argument("--mode-k", type=int, default=2,
                    help="cosine mode for the fourier family")
    ap.add_argument("--core-radius", type=float, default=0.5)
    ap.add_argument("--thickness", type=float, default=0.5)
    ap.add_argument("--csv", help="write the report table here")
    args = ap.parse_args(argv)

    body = disc_body((0.0, 0.0), args.core_radius, 512)
    base = make_domain(body, constant_profile(body, args.thickness))
    src = SourceSpec(kind="constant_on_C", f0=1.0)
    n_list = tuple(int(x) for x in args.n_list.split(","))

    seq = DomainSequence(base=base, family=args.family, n_list=n_list,
                         params={"mode_k": args.mode_k})
    rep = full_convergence_run(seq, src, args.t, args.grid_h)

    print("family %s, t = %g, h = %g" % (args.family, args.t, args.grid_h))
    header = "   n  " + "".join("%14s" % c for c in COLUMNS)
    print(header)
    for r in rep.rows:
        print("%4d  " % r.n
              + "".join("%14.6e" % getattr(r, c) for c in COLUMNS))

    tails = rep.monotone_tail()
    bad = [c for c in COLUMNS if not tails[c]]
    print("monotone over the last three rows: "
          + ("all columns" if not bad else "violated by " + ", ".join(bad)))

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("n",) + COLUMNS)
            for r in rep.rows:
                w.writerow([r.n] + [getattr(r, c) for c in COLUMNS])
        print("wrote %s" % args.csv)
    return 0 if not bad else 1


if __name__ == "__main__":
    sys.exit(main())
