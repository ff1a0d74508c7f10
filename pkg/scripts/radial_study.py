#!/usr/bin/env python3
"""Concentric-disc study: solve the reference case and print every quantity
next to its closed-form value.

    python scripts/radial_study.py --grid-h 0.0078125
    python scripts/radial_study.py --grid-h 0.00390625 --levels 8 --csv out.csv
"""

import argparse
import csv
import sys

import numpy as np

from gnplab.analysis import (bernoulli_slice_data, check_payne_rayner,
                             check_upper_bound_u, shell_energy)
from gnplab.geometry import constant_profile, disc_body, make_domain
from gnplab.levelsets import (check_coarea, check_estimate_d,
                              check_thickness_ode, extract_slice)
from gnplab.oracle import RadialOracle, lambda1_disc
from gnplab.solver import (SourceSpec, eigen_lambda1, gradient,
                           solve_biharmonic_system)


def row(name, got, want):
    rel = abs(got - want) / max(abs(want), 1e-300)
    print("  %-26s %14.8f  exact %14.8f  rel %.2e" % (name, got, want, rel))
    return (name, got, want, rel)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid-h", type=float, default=1.0 / 128)
    ap.add_argument("--core-radius", type=float, default=0.5)
    ap.add_argument("--thickness", type=float, default=0.5)
    ap.add_argument("--samples", type=int, default=512)
    ap.add_argument("--levels", type=int, default=5,
                    help="level lines to compare against the exact radii")
    ap.add_argument("--csv", help="write the comparison table here")
    args = ap.parse_args(argv)

    a, d = args.core_radius, args.thickness
    body = disc_body((0.0, 0.0), a, args.samples)
    dom = make_domain(body, constant_profile(body, d))
    src = SourceSpec(kind="constant_on_C", f0=1.0)
    orc = RadialOracle(a, a + d, 1.0)

    print("grid h = %g, core radius %g, shell thickness %g"
          % (args.grid_h, a, d))
    u, v = solve_biharmonic_system(dom, src, args.grid_h)
    rows = []

    print("fields:")
    rows.append(row("u(0)", float(u.sample([[0.0, 0.0]])[0]), orc.max_u))
    rows.append(row("u mass", u.integral(), orc.integral_u()))
    rows.append(row("v mass", v.integral(), orc.integral_v()))
    rows.append(row("grad u mass",
                    float(np.sum(gradient(u).magnitude()[u.inside]))
                    * args.grid_h ** 2, orc.integral_grad_u()))
    rows.append(row("f mass", u.meta["f_mass"], orc.source_mass()))

    print("level lines:")
    for t in np.linspace(0.2, 0.8, args.levels) * orc.u_core_boundary:
        sl = extract_slice(u, dom, float(t))
        r_med = float(np.median(np.linalg.norm(np.vstack(sl.contours),
                                               axis=1)))
        rows.append(row("r at t=%.4f" % t, r_med,
                        float(orc.level_radius(t))))

    print("structure checks:")
    lhs, rhs, rel = check_thickness_ode(u, dom, 0, 0.04, 1e-3)
    rows.append(row("d_t rate at t=0.04", lhs, float(orc.thickness_rate(0.04))))
    d_rec, _, _ = check_estimate_d(u, dom, 0, n_steps=200)
    rows.append(row("d rebuilt from levels", d_rec, d))
    for c in check_coarea(u, dom, src, n_levels=100, companion=v):
        rows.append(row("coarea " + c.name, c.rhs, c.lhs))
    bd = bernoulli_slice_data(u, v, dom, 0.0)
    rows.append(row("boundary |gu||gv| median",
                    float(np.median(bd.product[bd.defined])),
                    abs(float(orc.grad_u(np.array([a + d]))[0]))
                    * abs(float(orc.grad_v(np.array([a + d]))[0]))))

    print("inequalities:")
    lam, _ = eigen_lambda1(dom, args.grid_h)
    rows.append(row("lambda1", lam, lambda1_disc(a + d)))
    ub = check_upper_bound_u(u, dom)
    pr = check_payne_rayner(v, dom)
    print("  %-26s slack %14.8f  (>= 0: %s)" % ("upper bound on u mass",
                                                ub.slack, ub.satisfied))
    print("  %-26s slack %14.8f  (>= 0: %s)" % ("Payne-Rayner", pr.slack,
                                                pr.satisfied))
    print("  %-26s %14.8f" % ("shell energy",
                              shell_energy(u, v, dom, src)))

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["quantity", "computed", "exact", "rel_err"])
            w.writerows(rows)
        print("wrote %s" % args.csv)

    worst = max(r[3] for r in rows)
    print("worst relative error: %.2e" % worst)
    return 0 if worst < 0.05 else 1


if __name__ == "__main__":
    sys.exit(main())
