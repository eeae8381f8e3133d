"""Experiment drivers: analytic curve tables and Monte Carlo sweeps.

Tables serialize to CSV with 17 significant digits so that reruns with the
same config and seed are byte-identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .config import ExperimentConfig
from .error_analysis import (
    MonteCarloConfig,
    analytic_event_probability,
    monte_carlo_p_err,
    p_err_amqd_analytic,
    p_err_single_analytic,
)
from .exceptions import ConfigError


@dataclass
class Table:
    columns: list
    rows: list

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join("%.17g" % float(v) for v in row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {"columns": list(self.columns),
                   "rows": [[float(v) for v in row] for row in self.rows]}
        return json.dumps(payload, indent=2) + "\n"

    def write(self, path: str, fmt: str = "csv") -> None:
        if fmt == "csv":
            text = self.to_csv()
        elif fmt == "json":
            text = self.to_json()
        else:
            raise ConfigError(f"unknown output format: {fmt!r}")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def run_analytic_table(config: ExperimentConfig, include_factorial: bool = False) -> Table:
    """Closed-form single-carrier and multicarrier curves over the SNR grid."""
    columns = ["snr", "p_single"] + [f"p_amqd_l{l}" for l in config.l_values]
    rows = []
    for snr in config.snr_grid.linear_values():
        row = [float(snr), p_err_single_analytic(snr, config.zeta)]
        for l in config.l_values:
            row.append(p_err_amqd_analytic(snr, l, config.zeta, include_factorial))
        rows.append(tuple(row))
    return Table(columns, rows)


def run_figure2(config: ExperimentConfig) -> Table:
    """Reference error-probability figure; pure power laws, no factorial prefactor."""
    return run_analytic_table(config, include_factorial=False)


def _rate_bits_at(config: ExperimentConfig, snr: float) -> float:
    # default rate target scales with capacity: zeta * log2(1 + snr)
    if config.rate_bits is not None:
        return float(config.rate_bits)
    return float(config.zeta) * math.log2(1.0 + float(snr))


def run_monte_carlo(config: ExperimentConfig) -> Table:
    """Monte Carlo estimate vs the matching closed form, per grid point.

    Grid point i runs with seed + i.  The threshold event uses threshold
    1/snr; the rate event targets rate_bits (default zeta * log2(1 + snr)).
    """
    if len(config.l_values) != 1:
        raise ConfigError("the Monte Carlo sweep takes a single l")
    l = config.l_values[0]
    columns = ["snr", "p_hat", "ci_low", "ci_high", "analytic"]
    rows = []
    for i, snr in enumerate(config.snr_grid.linear_values()):
        snr = float(snr)
        rate_bits = _rate_bits_at(config, snr) if config.event == "rate" else None
        mc = MonteCarloConfig(
            l=l,
            trials=config.trials,
            seed=config.seed + i,
            event=config.event,
            snr=snr,
            rate_bits=rate_bits,
        )
        est = monte_carlo_p_err(mc, config.model, workers=config.workers)
        oracle = analytic_event_probability(
            config.model, config.event, l, snr=snr, rate_bits=rate_bits
        )
        rows.append((snr, est.p_hat, est.ci_low, est.ci_high, oracle))
    return Table(columns, rows)


def expected_error_warnings(config: ExperimentConfig, table: Table) -> list:
    """Points where trials * analytic p falls below 100 expected errors."""
    if "analytic" not in table.columns:
        return []
    warnings = []
    for snr, p in zip(table.column("snr"), table.column("analytic")):
        expected = float(p) * config.trials
        if 0.0 < expected < 100.0:
            warnings.append(
                "insufficient trials at snr=%g: expected errors ~ %.3g; "
                "interval reported anyway" % (snr, expected)
            )
    return warnings


def gnuplot_script(csv_path: str, columns: list) -> str:
    """Log-log plot script for a curve table written by this module."""
    lines = [
        "set datafile separator ','",
        "set logscale xy",
        "set xlabel 'SNR'",
        "set ylabel 'error probability'",
        "set key bottom left",
        "set grid",
    ]
    plots = []
    for idx, name in enumerate(columns[1:], start=2):
        plots.append(f"'{csv_path}' skip 1 using 1:{idx} with lines title '{name}'")
    lines.append("plot \\\n    " + ", \\\n    ".join(plots))
    return "\n".join(lines) + "\n"


def write_gnuplot_script(table: Table, csv_path: str, script_path: str) -> None:
    with open(script_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(gnuplot_script(csv_path, table.columns))
