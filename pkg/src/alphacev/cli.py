"""Command-line front end.

    alphacev simulate      one path, written as ``step,t,x`` rows
    alphacev strong-error  S_n at one grid size
    alphacev rate-sweep    strong rate for each alpha in ``--alphas``
    alphacev diagnostics   D < 0 frequency and bound, scheme moment, inverse moment

Settings come from defaults, then ``--config FILE`` (``key = value`` lines,
``#`` comments), then explicit flags. Experiment results are written in long
format with one metric per row (see ``CSV_HEADER``). ``--plot PATH`` also writes
whitespace-delimited plot data with ``#`` header comments.

Exit status: 0 success, 2 parameter validation failure (violations printed to
stderr as JSON), 1 any other failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from .convergence import RateReport, StrongErrorReport, estimate_strong_error, rate_sweep
from .diagnostics import estimate_dneg_frequency, estimate_inverse_moment, estimate_scheme_moment
from .model import GridSpec, ModelParams, validate_assumption_A
from .schemes import simulate_path
from .stable_rng import IncrementGrid, StableLawSpec

log = logging.getLogger(__name__)

CSV_HEADER = ("scheme", "alpha", "gamma", "a", "k", "sigma1", "sigma2", "x0", "T", "n",
              "samples", "seed", "metric", "value", "stderr")
PATH_HEADER = ("step", "t", "x")
COMMANDS = ("simulate", "strong-error", "rate-sweep", "diagnostics")

EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION = 0, 1, 2

_NORMALIZATION = {"levy": "levy_measure", "unit": "unit_scale"}


class ValidationFailure(Exception):
    def __init__(self, violations):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


@dataclass
class ExperimentConfig:
    command: str = "simulate"
    scheme: str = "implicit"
    alpha: float = 1.5
    gamma: float = 0.54
    a: float = 1.05
    k: float = 2.0
    sigma1: float = 0.37
    sigma2: float = 0.37
    x0: float = 1.0
    T: float = 1.0
    n: int = 64
    samples: int | None = None
    seed: int = 0
    workers: int | None = None
    normalization: str = "unit"
    out: str | None = None
    plot: str | None = None
    alphas: tuple[float, ...] = (1.2, 1.4, 1.6, 1.8)
    n0: int | None = None
    beta: float = 1.0
    p: float = 1.0

    def params(self, alpha: float | None = None) -> ModelParams:
        return ModelParams(a=self.a, k=self.k, sigma1=self.sigma1, sigma2=self.sigma2, gamma=self.gamma,
                           alpha=self.alpha if alpha is None else alpha, x0=self.x0)

    @property
    def law(self) -> str:
        return _NORMALIZATION[self.normalization]


_FIELD_TYPES = {
    "scheme": str, "alpha": float, "gamma": float, "a": float, "k": float, "sigma1": float,
    "sigma2": float, "x0": float, "T": float, "n": int, "samples": int, "seed": int, "workers": int,
    "normalization": str, "out": str, "plot": str, "n0": int, "beta": float, "p": float,
}


def _parse_alphas(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; keys use flag names (``sigma1``, ``n0``, ``alphas`` ...)."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "alphas":
            values[key] = _parse_alphas(value)
        elif key == "scheme":
            values[key] = value.replace("-", "_")
        elif key in _FIELD_TYPES:
            values[key] = _FIELD_TYPES[key](value)
        else:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alphacev", description=__doc__.split("\n\n")[0])
    common = argparse.ArgumentParser(add_help=False)
    # every default is None so that only explicit flags override the config file
    common.add_argument("--config", help="key = value settings file")
    common.add_argument("--scheme", choices=["implicit", "em", "drift-implicit"])
    for name in ("alpha", "gamma", "a", "k", "sigma1", "sigma2", "x0", "T", "beta", "p"):
        common.add_argument(f"--{name}", type=float)
    common.add_argument("--n", type=int, help="number of grid steps")
    common.add_argument("--samples", type=int, help="Monte Carlo sample count")
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int, help="worker processes (default: all cores)")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--plot", help="also write plot data to this path")
    common.add_argument("--normalization", choices=sorted(_NORMALIZATION))
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "rate-sweep":
            p.add_argument("--alphas", type=_parse_alphas, help="comma separated alpha values")
            p.add_argument("--n0", type=int, help="coarse grid size (rate uses n0 and 10*n0)")
    return parser


def parse_config(argv=None) -> ExperimentConfig:
    args = build_parser().parse_args(argv)
    values = read_config_file(args.config) if args.config else {}
    for key, value in vars(args).items():
        if key in ("config", "command") or value is None:
            continue
        values[key] = value.replace("-", "_") if key == "scheme" else value
    return ExperimentConfig(command=args.command, **values)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


class _Rows:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.rows = []

    def add(self, metric, value, stderr=float("nan"), *, alpha=None, n=None, samples=None):
        c = self.cfg
        scheme = c.scheme.replace("_", "-")
        self.rows.append((scheme, c.alpha if alpha is None else alpha, c.gamma, c.a, c.k, c.sigma1, c.sigma2,
                          c.x0, c.T, c.n if n is None else n, samples if samples is not None else c.samples,
                          c.seed, metric, float(value), float(stderr)))

    def render(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow(["" if v is None else _fmt(v) for v in row])
        return buf.getvalue()


def emit_plot_data(reports, path=None) -> str:
    """Plot-ready text for rate or strong-error reports.

    Rate reports give one ``rate`` row per alpha plus ``ref_half``,
    ``ref_inv2alpha`` and ``ref_alpha_quarter`` rows; strong-error reports give
    one ``s_n`` row per grid size. Columns are ``series x y stderr``.
    """
    reports = list(reports)
    if not reports:
        raise ValueError("no reports to emit")
    lines = ["# alphacev plot data"]
    if all(isinstance(r, RateReport) for r in reports):
        lines += ["# x: alpha", "# y: estimated strong rate; ref_* are reference lines", "# series x y stderr"]
        for r in reports:
            lines.append(f"rate {r.alpha!r} {r.rate_estimate!r} {r.rate_stderr!r}")
            for key in ("half", "inv2alpha", "alpha_quarter"):
                lines.append(f"ref_{key} {r.alpha!r} {r.reference_lines[key]!r} nan")
    elif all(isinstance(r, StrongErrorReport) for r in reports):
        lines += ["# x: n", "# y: S_n = E|X_T^2n - X_T^n|", "# series x y stderr"]
        for r in reports:
            lines.append(f"s_n {r.n!r} {r.s_n!r} {r.stderr!r}")
    else:
        raise TypeError("expected only RateReport or only StrongErrorReport instances")
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def read_plot_data(source) -> list[tuple[str, float, float, float]]:
    """Parse text written by :func:`emit_plot_data` into ``(series, x, y, stderr)`` rows."""
    text = Path(source).read_text() if not isinstance(source, str) or "\n" not in source else source
    rows = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        series, x, y, se = line.split()
        rows.append((series, float(x), float(y), float(se)))
    return rows


def _require_valid(params: ModelParams, T: float, ns) -> None:
    violations = []
    for n in ns:
        violations.extend(validate_assumption_A(params, GridSpec(T, n, params.k)).violations)
    if violations:
        raise ValidationFailure(list(dict.fromkeys(violations)))


def _make_params(cfg: ExperimentConfig, alpha=None) -> ModelParams:
    try:
        return cfg.params(alpha)
    except ValueError as exc:
        raise ValidationFailure(str(exc).split("; ")) from None


def _simulate(cfg: ExperimentConfig) -> str:
    params = _make_params(cfg)
    grid = GridSpec(cfg.T, cfg.n, params.k)
    _require_valid(params, cfg.T, [cfg.n])
    inc = IncrementGrid.sample(cfg.seed, 0, cfg.n, StableLawSpec(params.alpha, grid.dt, cfg.law))
    res = simulate_path(cfg.scheme, params, grid, inc, record_path=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PATH_HEADER)
    for i, x in enumerate(res.path):
        writer.writerow([i, repr(i * grid.dt), repr(float(x))])
    return buf.getvalue()


def _strong_error(cfg: ExperimentConfig) -> str:
    params = _make_params(cfg)
    _require_valid(params, cfg.T, [cfg.n, 2 * cfg.n])
    rep = estimate_strong_error(cfg.scheme, params, cfg.T, cfg.n, cfg.samples, cfg.seed, cfg.law, cfg.workers)
    rows = _Rows(cfg)
    rows.add("s_n", rep.s_n, rep.stderr, samples=rep.samples)
    if cfg.plot:
        emit_plot_data([rep], cfg.plot)
    return rows.render()


def _rate_sweep(cfg: ExperimentConfig) -> str:
    n0 = cfg.n0 or cfg.n
    admissible = []
    skipped = {}
    for alpha in cfg.alphas:
        params = _make_params(cfg, alpha)
        try:
            _require_valid(params, cfg.T, [n0, 2 * n0, 10 * n0, 20 * n0])
        except ValidationFailure as exc:
            skipped[alpha] = exc.violations
            continue
        admissible.append(alpha)
    for alpha, violations in skipped.items():
        print(json.dumps({"skipped_alpha": alpha, "violations": violations}), file=sys.stderr)
    if not admissible:
        raise ValidationFailure([f"alpha={a!r}: {'; '.join(v)}" for a, v in skipped.items()])
    reports = rate_sweep(cfg.scheme, _make_params(cfg, admissible[0]), cfg.T, n0, admissible,
                         samples=cfg.samples, seed=cfg.seed, normalization=cfg.law, workers=cfg.workers)
    rows = _Rows(cfg)
    for r in reports:
        for e in r.errors:
            rows.add("s_n", e.s_n, e.stderr, alpha=r.alpha, n=e.n, samples=e.samples)
        rows.add("rate", r.rate_estimate, r.rate_stderr, alpha=r.alpha, n=n0, samples=r.errors[0].samples)
        for key in ("half", "inv2alpha", "alpha_quarter"):
            rows.add(f"ref_{key}", r.reference_lines[key], alpha=r.alpha, n=n0, samples=r.errors[0].samples)
    if cfg.plot:
        emit_plot_data(reports, cfg.plot)
    return rows.render()


def _diagnostics(cfg: ExperimentConfig) -> str:
    params = _make_params(cfg)
    grid = GridSpec(cfg.T, cfg.n, params.k)
    _require_valid(params, cfg.T, [cfg.n])
    samples = cfg.samples or 10**5
    rows = _Rows(cfg)
    d = estimate_dneg_frequency(params, grid, samples, cfg.seed, cfg.law, cfg.workers)
    rows.add("dneg_freq", d.observed_freq, d.mc_stderr, samples=samples)
    rows.add("dneg_bound", d.theoretical_bound, samples=samples)
    m = estimate_scheme_moment(params, grid, cfg.beta, samples, cfg.seed, cfg.law, cfg.workers)
    rows.add("moment", m.estimate, m.stderr, samples=samples)
    inv = estimate_inverse_moment(params, grid, cfg.p, samples, cfg.seed, normalization=cfg.law,
                                  workers=cfg.workers)
    rows.add("inv_moment", inv.estimate, inv.stderr, samples=samples - inv.excluded)
    return rows.render()


_RUNNERS = {
    "simulate": _simulate,
    "strong-error": _strong_error,
    "rate-sweep": _rate_sweep,
    "diagnostics": _diagnostics,
}


def run(cfg: ExperimentConfig) -> int:
    """Execute one experiment and write its CSV; returns the exit status."""
    try:
        if cfg.command not in _RUNNERS:
            raise ValueError(f"unknown command {cfg.command!r}")
        if cfg.normalization not in _NORMALIZATION:
            raise ValueError(f"unknown normalization {cfg.normalization!r}")
        text = _RUNNERS[cfg.command](cfg)
        if cfg.out:
            Path(cfg.out).write_text(text)
        else:
            sys.stdout.write(text)
    except ValidationFailure as exc:
        print(json.dumps({"ok": False, "violations": exc.violations}), file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - reported through the exit status
        log.debug("run failed", exc_info=True)
        print(f"alphacev: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = parse_config(argv)
    except (ValueError, OSError) as exc:
        print(f"alphacev: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
