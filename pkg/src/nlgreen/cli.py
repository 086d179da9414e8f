"""Command line entry point: ``nlgreen {green,solve,table1,sweep}``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys

import numpy as np

from . import analysis
from .config import ConfigError, ExperimentConfig, emit, load
from .greens import build_green_from_homogeneous, wrap_closed_form
from .models import CATALOG, boussinesq_strengths
from .quadrature import Grid, GridFunction, weak_form_strength

log = logging.getLogger("nlgreen")

# used when no --config is given
PRESETS = {
    "green": ExperimentConfig(),
    "solve": ExperimentConfig(),
    "table1": ExperimentConfig(model="kdv", c=1.0, source="exp", N=(1, 2, 4), T=1.2, plot_step=0.1),
    "sweep": ExperimentConfig(model="boussinesq", v=1.0, modulus=0.5, N=(1, 2, 3)),
}


def _write(path: str, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _kv(items) -> str:
    return "".join(f"{k}: {v!r}\n" if not isinstance(v, str) else f"{k}: {v}\n" for k, v in items)


def write_manifest(config: ExperimentConfig, command: str) -> str:
    os.makedirs(config.out, exist_ok=True)
    path = os.path.join(config.out, "manifest.ini")
    _write(path, f"# command: {command}\n" + emit(config))
    return path


def _problem(config: ExperimentConfig):
    return CATALOG[config.model](**config.model_kwargs())


def _kernel(problem, config: ExperimentConfig):
    kind = config.kernel
    if kind == "auto":
        kind = "closed_form" if problem.closed_form is not None else "homogeneous"
    if kind == "closed_form":
        grid = Grid.from_horizon(0.0, config.dt, config.T)
        return wrap_closed_form(problem, measure=False, grid=grid)
    return build_green_from_homogeneous(problem, config.s, config.settings.ivp)


def cmd_green(config: ExperimentConfig) -> dict:
    """Kernel samples, metadata and a weak-form strength report."""
    problem = _problem(config)
    green = _kernel(problem, config)
    n = problem.order
    grid = Grid.from_horizon(0.0, config.dt, min(config.T, green.horizon))
    sampled = green.sample(grid)
    sampled.write_csv(os.path.join(config.out, "kernel.csv"), header="t,G")
    _write(os.path.join(config.out, "kernel_meta.txt"), green.metadata_text())

    if green.provenance == "closed_form":
        state = [np.asarray(d) for d in problem.closed_form_derivatives(grid.t, n - 1)]
    else:
        state = green.sample_state(grid)
    report = weak_form_strength(sampled, problem, max_order=n - 1, state=state)
    measured = report[green.order]
    lines = [("kernel_order", green.order), ("singular_strength", green.strength),
             ("measured_strength", measured), ("condition", report.condition),
             ("residual", report.residual)]
    lines += [(f"coefficient_delta{q}", c) for q, c in report.pairs()]
    if config.model == "boussinesq":
        ref = boussinesq_strengths(config.v, config.modulus)
        quoted, jump = ref["quoted_strength"], ref["jump_strength"]
        rq, rj = measured / quoted, measured / jump
        agree = [name for name, r in (("quoted", rq), ("jump", rj)) if abs(r - 1) <= 0.05]
        lines += [("quoted_strength", quoted), ("jump_strength", jump),
                  ("ratio_to_quoted", rq), ("ratio_to_jump", rj),
                  ("agrees_with", ",".join(agree) or "neither")]
        if "quoted" not in agree:
            lines.append(("note", "measured strength differs from the quoted -(3/4)c^2v^4/(1+c^2)^2 value"))
    if green.provenance == "homogeneous_solve":
        lines += [("residual_max", _interior_residual(problem, green, grid))]
    _write(os.path.join(config.out, "strength.txt"), _kv(lines))
    return dict(lines)


def _interior_residual(problem, green, grid: Grid) -> float:
    state = green.sample_state(grid)
    top = np.gradient(state[-1], grid.dt, edge_order=2)
    r = problem.residual(list(state) + [top])
    return float(np.max(np.abs(r[2:-2])))


def _source_table(config: ExperimentConfig):
    return GridFunction.read_csv(config.source_path) if config.source == "custom" else None


def cmd_solve(config: ExperimentConfig) -> analysis.ForcedRun:
    """Expansion for each N plus reference, residuals, fit reports and error curves."""
    problem = _problem(config)
    green = _kernel(problem, config)
    s = config.settings
    run = analysis.run_forced(problem, green, config.source, config.N, s, _source_table(config))
    out = config.out
    run.reference.write_csv(os.path.join(out, "reference.csv"), header="t,w_ref")
    run.f.write_csv(os.path.join(out, "source.csv"), header="t,f")
    Ns = sorted(set(config.N))
    for N in Ns:
        sol = run.solutions[N]
        sol.w.write_csv(os.path.join(out, f"solution_N{N}.csv"), header="t,w")
        resid = sol.w.with_values(sol.w.values - run.reference.values[: len(sol.w)])
        resid.write_csv(os.path.join(out, f"residual_N{N}.csv"), header="t,residual")
        _write(os.path.join(out, f"fit_N{N}.txt"), sol.coefficients.report())
        rep = analysis.er1(sol.w, run.reference, window=s.fit_window, plot_step=s.plot_step)
        rep.er_grid.write_csv(os.path.join(out, f"er1_N{N}.csv"), header="t,Er1")
    for a, b in zip(Ns, Ns[1:]):
        rep = analysis.er2(run.w(a), run.w(b), window=s.fit_window, plot_step=s.plot_step)
        rep.er_grid.write_csv(os.path.join(out, f"er2_N{a}_N{b}.csv"), header="t,Er2")
    return run


def cmd_table1(config: ExperimentConfig) -> analysis.Table1Result:
    if config.model != "kdv" or config.source != "exp":
        raise ConfigError("table1 is defined for model=kdv with source=exp")
    result = analysis.table1_experiment(analysis.Table1Config(c=config.c, settings=config.settings,
                                                              Ns=tuple(config.N)))
    _write(os.path.join(config.out, "table1.csv"), result.to_csv())
    for N, rep in result.reports.items():
        rep.er_grid.write_csv(os.path.join(config.out, f"er1_N{N}.csv"), header="t,Er1")
    return result


def cmd_sweep(config: ExperimentConfig) -> list:
    """Leading-term dominance over several sources."""
    problem = _problem(config)
    green = _kernel(problem, config)
    pairs = {src: analysis.DOMINANCE_PAIRS.get(src, (1, 2)) for src in config.sweep_sources}
    results = analysis.leading_term_dominance(problem, green, config.settings, pairs)
    rows = ["source,N1,N2,ratio,max_Er2,min_Er2\n"]
    for r in results:
        rows.append(f"{r.source},{r.pair[0]},{r.pair[1]},{r.ratio!r},{r.er2.max_er!r},{r.er2.min_er!r}\n")
        r.er2.er_grid.write_csv(os.path.join(config.out, f"er2_{r.source}.csv"), header="t,Er2")
    _write(os.path.join(config.out, "dominance.csv"), "".join(rows))
    return results


COMMANDS = {"green": cmd_green, "solve": cmd_solve, "table1": cmd_table1, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nlgreen", description="Nonlinear Green's function experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or name).strip().splitlines()[0])
        p.add_argument("--config", metavar="PATH", help="INI experiment config")
        p.add_argument("--out", metavar="DIR", help="output directory (overrides [output] dir)")
        p.add_argument("--seedless", action="store_true", default=True,
                       help="deterministic pipeline (always on; nothing is random)")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def resolve_config(args) -> ExperimentConfig:
    config = load(args.config) if args.config else PRESETS[args.command]
    if args.out:
        config = dataclasses.replace(config, out=args.out)
    return config.validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config = resolve_config(args)
    except (ConfigError, OSError) as exc:
        print(f"nlgreen: config error: {exc}", file=sys.stderr)
        return 2
    write_manifest(config, args.command)
    COMMANDS[args.command](config)
    print(f"wrote {args.command} outputs to {config.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
