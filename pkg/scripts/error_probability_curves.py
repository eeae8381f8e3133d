#!/usr/bin/env python3
# Closed-form error probability curves over an SNR grid, optionally with a
# Monte Carlo overlay on the same grid.  Writes CSV ready for gnuplot.

import argparse

from amqd import (
    ExperimentConfig,
    SnrGrid,
    run_analytic_table,
    run_monte_carlo,
    write_gnuplot_script,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--l", type=int, action="append",
                    help="sub-channel count, repeatable (default 5 and 10)")
    ap.add_argument("--zeta", type=float, default=0.6, help="rate allocation fraction")
    ap.add_argument("--snr-db-min", type=float, default=0.0)
    ap.add_argument("--snr-db-max", type=float, default=40.0)
    ap.add_argument("--snr-db-step", type=float, default=1.0)
    ap.add_argument("--factorial", action="store_true",
                    help="apply the 1/l! small-outage prefactor")
    ap.add_argument("--overlay-trials", type=int, default=0,
                    help="if > 0, also run a Monte Carlo pass with this many trials")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="curves.csv")
    args = ap.parse_args()

    ls = tuple(args.l) if args.l else (5, 10)
    grid = SnrGrid(args.snr_db_min, args.snr_db_max, args.snr_db_step)
    config = ExperimentConfig(l_values=ls, zeta=args.zeta, snr_grid=grid,
                              seed=args.seed)
    table = run_analytic_table(config, include_factorial=args.factorial)
    table.write(args.out, "csv")
    write_gnuplot_script(table, args.out, args.out + ".gp")
    print("wrote %s (%d rows) and %s" % (args.out, len(table.rows), args.out + ".gp"))

    if args.overlay_trials > 0:
        for l in ls:
            mc_config = ExperimentConfig(l_values=(l,), zeta=args.zeta, snr_grid=grid,
                                         trials=args.overlay_trials, seed=args.seed)
            mc = run_monte_carlo(mc_config)
            mc_out = args.out.replace(".csv", "") + "_mc_l%d.csv" % l
            mc.write(mc_out, "csv")
            print("wrote %s" % mc_out)


if __name__ == "__main__":
    main()
