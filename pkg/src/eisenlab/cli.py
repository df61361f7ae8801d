"""Command-line entry point.

    eisenlab verify --spec a_geo.json [--seed 42] [--samples 200] [--output r.json]
    eisenlab integrate --spec a_pdm.json [--initial q1,..,pn] [--format csv]
    eisenlab brackets --spec c_pot.json
    eisenlab reduce-check --spec d_geo.json [--t-end 5]
    eisenlab catalog

Exit codes: 0 pass, 1 verification failure, 2 configuration error, 3 domain exit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

from .catalog import COEFFICIENTS, SystemSpec, build_system, catalog_listing, reference_start
from .charts import get_chart
from .core import PhasePoint
from .dynamics import METHODS, integrate, monitor
from .errors import DomainError, EisenlabError, SpecError

COMMANDS = ("verify", "integrate", "brackets", "reduce-check", "catalog")
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DOMAIN = 0, 1, 2, 3


class ConfigError(EisenlabError):
    """Malformed command-line configuration."""


@dataclass
class RunConfig:
    command: str
    spec_path: str | None = None
    seed: int = 42
    samples: int = 200
    h: float = 1e-3
    t_end: float | None = None
    initial: list[float] | None = None
    chart: str | None = None
    output_path: str | None = None
    format: str = "json"
    figure: str | None = None
    mutate: tuple[str, str] | None = None
    flow: bool = True
    method: str = "ImplicitMidpoint"

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.command != "catalog" and not self.spec_path:
            raise ConfigError(f"{self.command} needs --spec")
        if self.samples <= 0:
            raise ConfigError("--samples must be positive")
        if not self.h > 0:
            raise ConfigError("--h must be positive")
        if self.t_end is not None and self.command == "reduce-check" and self.t_end <= 0:
            raise ConfigError("--t-end must be positive")
        if self.format not in ("json", "csv", "text"):
            raise ConfigError("--format must be json, csv or text")
        if self.format == "csv" and self.command != "integrate":
            raise ConfigError("csv output is only available for integrate")
        if self.format == "text" and self.command != "catalog":
            raise ConfigError("text output is only available for catalog")
        if self.method not in METHODS:
            raise ConfigError(f"--method must be one of {METHODS}")


def _fmt(x: float) -> str:
    return f"{float(x):.16e}"


def _load_spec(path: str) -> SystemSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read spec file {path}: {exc.strerror}") from None
    return SystemSpec.from_json(text)


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_verify(cfg: RunConfig, spec: SystemSpec) -> int:
    from .verify import verify_system

    t_end = 10.0 if cfg.t_end is None else cfg.t_end
    report = verify_system(spec, cfg.seed, cfg.samples, flow=cfg.flow, mutation=cfg.mutate,
                           h=cfg.h, t_end=t_end)
    _emit(report.to_json(), cfg.output_path)
    if cfg.figure:
        from .plotting import plot_report

        plot_report(report, cfg.figure)
    for c in report.failures:
        print(f"FAIL {c.kind}: {c.name} residual {c.max_residual:.3e} > {c.tolerance:.1e}",
              file=sys.stderr)
    print(f"{spec.label}: {'PASS' if report.overall else 'FAIL'} "
          f"({len(report.checks) - len(report.failures)}/{len(report.checks)} checks)",
          file=sys.stderr)
    return EXIT_OK if report.overall else EXIT_FAIL


def _initial_point(cfg: RunConfig, system) -> PhasePoint:
    n = system.ndof
    chart = get_chart(cfg.chart) if cfg.chart else None
    if chart is not None and chart.dim != n:
        raise ConfigError(f"chart {chart.id} has dimension {chart.dim}, system has {n} dof")
    if cfg.initial is None:
        if chart is not None and chart.planar != "Cartesian":
            raise ConfigError("--chart needs --initial")
        return reference_start(system, cfg.seed)
    if len(cfg.initial) != 2 * n:
        raise ConfigError(f"--initial needs {2 * n} values, got {len(cfg.initial)}")
    return PhasePoint(cfg.initial[:n], cfg.initial[n:], chart)


def _trajectory_csv(traj) -> str:
    n = traj.n
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    names = list(traj.monitors)
    w.writerow(["t"] + [f"q{i + 1}" for i in range(n)] + [f"p{i + 1}" for i in range(n)] + names)
    for k, t in enumerate(traj.times):
        row = [t, *traj.states_array[k]] + [traj.monitors[m][k] for m in names]
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _trajectory_json(traj, spec: SystemSpec) -> str:
    doc = {
        "system": spec.to_dict(), "chart": traj.chart.id, "method": traj.method,
        "t": [_fmt(t) for t in traj.times],
        "states": [[_fmt(v) for v in row] for row in traj.states_array],
        "monitors": {k: [_fmt(v) for v in vals] for k, vals in traj.monitors.items()},
        "summary": {k: {kk: _fmt(vv) for kk, vv in s.items()} for k, s in traj.summary.items()},
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _cmd_integrate(cfg: RunConfig, spec: SystemSpec) -> int:
    system = build_system(spec)
    z0 = _initial_point(cfg, system)
    H = system.chart_hamiltonians.get(z0.chart.id, system.hamiltonian)
    t_end = 10.0 if cfg.t_end is None else cfg.t_end
    traj = integrate(H, z0, t_end, cfg.h, cfg.method)
    monitor(traj, system.conserved)
    text = _trajectory_csv(traj) if cfg.format == "csv" else _trajectory_json(traj, spec)
    _emit(text, cfg.output_path)
    if cfg.figure:
        from .plotting import plot_drift

        plot_drift(traj, cfg.figure, title=f"{spec.label}, {traj.method}, h={cfg.h:g}")
    worst = max(traj.summary.items(), key=lambda kv: kv[1]["relative_drift"])
    print(f"{spec.label}: {len(traj) - 1} steps to t={t_end:g}, largest relative drift "
          f"{worst[1]['relative_drift']:.3e} ({worst[0]})", file=sys.stderr)
    return EXIT_OK


def _cmd_brackets(cfg: RunConfig, spec: SystemSpec) -> int:
    from .verify import involution_matrix

    table = involution_matrix(spec, cfg.samples, cfg.seed, mutation=cfg.mutate)
    _emit(table.format() + "\n", cfg.output_path)
    return EXIT_OK if table.passed else EXIT_FAIL


def _cmd_reduce(cfg: RunConfig, spec: SystemSpec) -> int:
    from .verify import reduction_check

    z0 = None
    if cfg.initial is not None:
        if len(cfg.initial) != 4:
            raise ConfigError("reduce-check --initial takes x,y,px,py")
        z0 = PhasePoint(cfg.initial[:2], cfg.initial[2:])
    t_end = 5.0 if cfg.t_end is None else cfg.t_end
    res = reduction_check(spec.family, spec.k, z0, t_end, cfg.h, cfg.method)
    doc = {"family": res.family, "k": list(spec.k), "t_end": _fmt(t_end), "h": _fmt(cfg.h),
           "distance": _fmt(res.distance), "pz_drift": _fmt(res.pz_drift),
           "tolerance": _fmt(res.tolerance), "pass": res.passed}
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", cfg.output_path)
    return EXIT_OK if res.passed else EXIT_FAIL


def _cmd_catalog(cfg: RunConfig) -> int:
    rows = catalog_listing()
    if cfg.format == "json":
        _emit(json.dumps(rows, indent=2) + "\n", cfg.output_path)
        return EXIT_OK
    lines = [f"{'family':<7}{'tier':<14}{'H':<6}integrals"]
    for r in rows:
        lines.append(f"{r['family']:<7}{r['tier']:<14}{r['hamiltonian']:<6}"
                     f"{', '.join(r['integrals'])}")
    _emit("\n".join(lines) + "\n", cfg.output_path)
    return EXIT_OK


def run(cfg: RunConfig) -> int:
    """Execute one command and return the process exit code."""
    try:
        cfg.validate()
        if cfg.command == "catalog":
            return _cmd_catalog(cfg)
        spec = _load_spec(cfg.spec_path)
        if cfg.mutate is not None:
            build_system(spec, cfg.mutate)  # validate the mutation target early
        handler = {"verify": _cmd_verify, "integrate": _cmd_integrate,
                   "brackets": _cmd_brackets, "reduce-check": _cmd_reduce}[cfg.command]
        return handler(cfg, spec)
    except DomainError as exc:
        when = f" (t={exc.time:g})" if exc.time is not None and "t=" not in str(exc) else ""
        print(f"error: {exc}{when}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ConfigError, SpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EisenlabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _mutation(text: str) -> tuple[str, str]:
    name, sep, coef = text.partition(":")
    if not sep or coef not in COEFFICIENTS:
        raise argparse.ArgumentTypeError(
            f"expected NAME:COEF with COEF in {', '.join(COEFFICIENTS)}, got {text!r}")
    return name, coef


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eisenlab", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, flow=False):
        p.add_argument("--spec", dest="spec_path", required=True, help="system spec JSON file")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--samples", type=int, default=200)
        p.add_argument("--output", dest="output_path", help="write here instead of stdout")
        if flow:
            p.add_argument("--h", type=float, default=1e-3, help="step size")
            p.add_argument("--t-end", dest="t_end", type=float, default=None)
            p.add_argument("--method", choices=METHODS, default="ImplicitMidpoint")

    p = sub.add_parser("verify", help="run every suite on one system")
    common(p, flow=True)
    p.add_argument("--mutate", type=_mutation, help="flip COEF inside integral NAME")
    p.add_argument("--no-flow", dest="flow", action="store_false", help="skip trajectory checks")
    p.add_argument("--figure", help="save a residual/tolerance chart (PNG, PDF, SVG)")
    p.add_argument("--format", choices=("json",), default="json")

    p = sub.add_parser("integrate", help="integrate and export a trajectory")
    common(p, flow=True)
    p.add_argument("--initial", type=_floats, help="q1,..,qn,p1,..,pn in --chart variables")
    p.add_argument("--chart", help="chart of --initial (default Cartesian)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--figure", help="save a drift plot")

    p = sub.add_parser("brackets", help="print the involution matrix")
    common(p)
    p.add_argument("--mutate", type=_mutation)

    p = sub.add_parser("reduce-check", help="compare the p_z = sqrt(2) lifted flow with 2D")
    common(p, flow=True)
    p.add_argument("--initial", type=_floats, help="x,y,px,py")

    p = sub.add_parser("catalog", help="list the 20 catalog systems")
    p.add_argument("--output", dest="output_path")
    p.add_argument("--format", choices=("json", "text"), default="text")
    return parser


def parse_config(argv=None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    cfg = RunConfig(command=ns.pop("command"))
    for key, value in ns.items():
        setattr(cfg, key, value)
    return cfg


def main(argv=None) -> int:
    return run(parse_config(argv))


if __name__ == "__main__":
    sys.exit(main())
