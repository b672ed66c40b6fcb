"""Command-line front end: one run, one CSV time series.

    lambda-cavity --preset fig3e --out fig3e.csv
    lambda-cavity --delta1 5 --delta2 4 --p 1 --tmax 30 --samples 1500
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, replace

import numpy as np

from .entanglement import entropy_series
from .model import ModelConfig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2

HEADER = ["t", "scaled_time", "entropy", "rho11", "rho22", "rho33", "solver_path"]

# Detuning for the equal-detuning figure; its value is not given with the figure.
FIG2_DELTA = 10.0


@dataclass(frozen=True)
class RunConfig:
    preset: str | None = None
    delta1: float = 0.0
    delta2: float = 0.0
    p: int | None = None
    nbar: float = 25.0
    t_max: float = 50.0
    samples: int = 2000
    out_path: str = "-"
    format: str = "csv"

    def __post_init__(self):
        if self.samples < 2:
            raise ValueError("samples must be >= 2")
        if not self.t_max > 0:
            raise ValueError("t_max must be > 0")
        if self.p is not None and self.p < 1:
            raise ValueError("p must be a positive integer")
        if self.format != "csv":
            raise ValueError(f"unsupported format {self.format!r}")

    def model(self) -> ModelConfig:
        return ModelConfig(lambda1=1.0, lambda2=1.0, delta1=self.delta1, delta2=self.delta2,
                           p=self.p, nbar=self.nbar)


def preset_table() -> list[tuple[str, RunConfig]]:
    detunings = {
        "fig1": (0.0, 0.0),
        "fig2": (FIG2_DELTA, FIG2_DELTA),
        "fig3": (0.0, 100.0),
        "fig4": (5.0, 4.0),
    }
    # (a, b) at rest, (c, d) p = 1, (e, f) p = 3; panel pairs show entropy and populations.
    motion = {"a": None, "b": None, "c": 1, "d": 1, "e": 3, "f": 3}
    table = []
    for fig, (d1, d2) in detunings.items():
        for panel, p in motion.items():
            name = fig + panel
            table.append((name, RunConfig(preset=name, delta1=d1, delta2=d2, p=p, nbar=25.0)))
    return table


def get_preset(name: str) -> RunConfig:
    presets = dict(preset_table())
    try:
        return presets[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(presets)}") from None


def _preset_help() -> str:
    lines = ["presets (nbar = 25, lambda1 = lambda2 = 1):",
             "  name    delta1   delta2   motion p"]
    for name, rc in preset_table():
        p = "-" if rc.p is None else str(rc.p)
        lines.append(f"  {name:<7} {rc.delta1:>6g}   {rc.delta2:>6g}   {p:>8}")
    lines.append(f"  fig2 uses delta = {FIG2_DELTA:g}; override with --delta1/--delta2.")
    return "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="lambda-cavity",
        description="Entropy and populations of a Lambda atom in a single-mode cavity.",
        epilog=_preset_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--preset", choices=[name for name, _ in preset_table()], metavar="NAME",
                        help="figure preset; overrides the physics flags")
    parser.add_argument("--delta1", type=float, default=0.0)
    parser.add_argument("--delta2", type=float, default=0.0)
    parser.add_argument("--p", type=_positive_int, default=None,
                        help="half wavelengths of the mode; omit for an atom at rest")
    parser.add_argument("--nbar", type=float, default=25.0, help="mean photon number (default 25)")
    parser.add_argument("--tmax", type=float, default=50.0, help="final time in units of 1/lambda")
    parser.add_argument("--samples", type=int, default=2000)
    parser.add_argument("--out", default="-", help="output path, '-' for stdout")
    parser.add_argument("--format", choices=["csv"], default="csv")
    return parser


def parse_args(argv=None) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        if ns.preset is not None:
            base = get_preset(ns.preset)
            return replace(base, t_max=ns.tmax, samples=ns.samples, out_path=ns.out, format=ns.format)
        return RunConfig(delta1=ns.delta1, delta2=ns.delta2, p=ns.p, nbar=ns.nbar, t_max=ns.tmax,
                         samples=ns.samples, out_path=ns.out, format=ns.format)
    except ValueError as exc:
        parser.error(str(exc))


def write_csv(series, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(HEADER)
    for row in zip(series.t, series.scaled_time, series.entropy,
                   series.rho11, series.rho22, series.rho33):
        writer.writerow([repr(float(v)) for v in row] + [series.solver_path])


def run(cfg: RunConfig) -> int:
    try:
        model = cfg.model()
        t_grid = np.linspace(0.0, cfg.t_max, cfg.samples)
        series = entropy_series(model, t_grid)
    except Exception as exc:
        print(f"lambda-cavity: computation failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    try:
        if cfg.out_path == "-":
            write_csv(series, sys.stdout)
        else:
            with open(cfg.out_path, "w", newline="", encoding="ascii") as fh:
                write_csv(series, fh)
    except OSError as exc:
        print(f"lambda-cavity: cannot write {cfg.out_path}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def main(argv=None) -> int:
    return run(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
