# -*- coding: utf-8 -*-
"""The `virodyn` command line tool.

.. code-block:: shell

    virodyn list
    virodyn equilibria example2_beta1 --out runs/e2
    virodyn simulate example1_beta0003 --out runs/e1 --t-end 600
    virodyn verify example2_beta00096 --target e1
    virodyn sweep example1_beta0003 --param incidence.beta \
        --values 0.003,0.0096,1 --threshold --workers 4

Exit statuses are 0 on success, 1 on a numerical failure or a failed
audit and 2 on a configuration error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence

from loguru import logger

from .constants import (
    _DEFAULT_AUDIT_TOLERANCE,
    _DEFAULT_CSV_NAME,
    _DEFAULT_LOG_LEVEL,
    _DEFAULT_LYAPUNOV_CSV_NAME,
    _DEFAULT_REPORT_NAME,
    _DEFAULT_SVG_NAME,
    _DEFAULT_SWEEP_CSV_NAME,
    _DEFAULT_TRANSIENT_FRACTION,
    STATE_LABELS,
    PACKAGE_NAME,
    ExitStatus,
    Regime,
)
from .equilibria import (
    check_uniqueness_sets,
    classify,
    locate_threshold,
    report_to_dict,
    reproduction_summary,
)
from .exception import (
    AuditConfigError,
    BracketError,
    HypothesisError,
    ScenarioError,
    VirodynError,
)
from .integrator import (
    Trajectory,
    gamma_bounds,
    integrate,
    monitor,
    relative_distance,
)
from .logging import bind_scenario, setup_logger
from .model.hypotheses import validate_hypotheses
from .scenario import (
    Scenario,
    bundled_scenarios,
    load_scenario,
    scenario_from_config,
)
from .utils.svg import save_line_plot
from .utils.tables import write_table
from .verifier import audit, functional_name

_TARGETS = {"e0": "E0", "e1": "E1", "e2": "E2"}

_REGIME_TARGETS = {
    Regime.INFECTION_FREE: "e0",
    Regime.CTL_INACTIVATED: "e1",
    Regime.CTL_ACTIVATED: "e2",
}


def _output_path(
    out_dir: Optional[str],
    configured: Optional[str],
    default_name: str,
) -> Optional[str]:
    """Resolve an output file: configured paths are taken relative to
    `--out`, and `--out` alone writes the default file name."""
    if configured:
        if out_dir and not os.path.isabs(configured):
            return os.path.join(out_dir, configured)
        return configured
    if out_dir:
        return os.path.join(out_dir, default_name)
    return None


def _load(args: argparse.Namespace) -> Scenario:
    scenario = load_scenario(args.scenario)
    bind_scenario(scenario.name)
    report = validate_hypotheses(scenario.model)
    logger.debug("Hypotheses:\n" + report.to_text())
    report.raise_for_failures()
    return scenario


def _simulate(
    scenario: Scenario,
    t_end: Optional[float],
    h: Optional[float],
) -> Trajectory:
    t_end = scenario.run.t_end if t_end is None else t_end
    if not t_end > 0:
        raise ScenarioError("run", f"t_end must be positive, got {t_end}.")
    h = scenario.run.h if h is None else h
    if h is not None and not 0 < h <= t_end:
        raise ScenarioError("run", f"h must lie in (0, t_end], got {h}.")
    return integrate(
        scenario.model,
        scenario.history,
        t_end,
        h,
        scenario.quad,
        scenario.run.adaptive,
    )


def _fmt_state(state: Sequence[float]) -> str:
    return "(" + ", ".join(f"{_:.6f}" for _ in state) + ")"


# ============================== subcommands ==============================


def run_equilibria(args: argparse.Namespace) -> int:
    """Classify the scenario and print or write the report."""
    scenario = _load(args)
    report = classify(scenario.model)
    print(reproduction_summary(report))

    for name, E in (("E1", report.E1), ("E2", report.E2)):
        if E is None:
            continue
        sets = check_uniqueness_sets(scenario.model, E, xbar=report.xbar)
        print(
            f"uniqueness at {name}: growth "
            f"{'pass' if sets.growth_condition else 'fail'}, incidence "
            f"{'pass' if sets.incidence_condition else 'fail'}",
        )

    path = _output_path(
        args.out,
        scenario.outputs.report,
        _DEFAULT_REPORT_NAME,
    )
    if path:
        dirname = os.path.dirname(path)
        if dirname:
            os.makedirs(dirname, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(report_to_dict(report), f, indent=4)
        logger.info(f"Report written to {path}.")
    return ExitStatus.SUCCESS


def run_simulate(args: argparse.Namespace) -> int:
    """Integrate the scenario, check the trajectory and write it."""
    scenario = _load(args)
    report = classify(scenario.model)
    trajectory = _simulate(scenario, args.t_end, args.h)

    checks = monitor(trajectory, gamma_bounds(scenario.model))
    target = report.target()
    print(f"scenario        {scenario.name}")
    print(f"regime          {report.regime.label}")
    print(f"final state     {_fmt_state(trajectory.final_state)}")
    print(f"target          {_fmt_state(target)}")
    print(
        "distance        "
        f"{relative_distance(trajectory.final_state, target):.3g}",
    )
    print(f"minima          {_fmt_state(checks.minima)}")
    print(f"bounded         {checks.eventually_bounded}")

    csv_path = _output_path(args.out, scenario.outputs.csv, _DEFAULT_CSV_NAME)
    if csv_path:
        trajectory.to_csv(csv_path)
        logger.info(f"Trajectory written to {csv_path}.")
    plot_path = _output_path(
        args.out,
        scenario.outputs.plot,
        _DEFAULT_SVG_NAME,
    )
    if plot_path and not args.no_plot:
        save_line_plot(
            plot_path,
            trajectory.times,
            dict(zip(STATE_LABELS, trajectory.states.T)),
            title=scenario.name,
        )
        logger.info(f"Plot written to {plot_path}.")

    if not checks.positive:
        return ExitStatus.NUMERICAL_FAILURE
    return ExitStatus.SUCCESS


def run_verify(args: argparse.Namespace) -> int:
    """Audit a Lyapunov functional along the scenario's trajectory."""
    scenario = _load(args)
    report = classify(scenario.model)
    target = args.target or scenario.run.target
    if target is None:
        target = _REGIME_TARGETS[report.regime]
    functional = functional_name(target)
    E = getattr(report, _TARGETS[functional[-2:].lower()])
    if E is None:
        raise AuditConfigError(
            f"{functional} needs {functional[-2:]}, which does not exist in "
            f"the {report.regime.label} regime.",
        )

    trajectory = _simulate(scenario, args.t_end, args.h)
    result = audit(
        functional,
        scenario.model,
        E,
        trajectory,
        scenario.quad,
        transient_fraction=args.transient,
        tol=args.tol,
    )
    print(result.to_text())

    path = _output_path(
        args.out,
        scenario.outputs.lyapunov,
        _DEFAULT_LYAPUNOV_CSV_NAME,
    )
    if path:
        write_table(path, ("t", "V"), list(zip(result.times, result.values)))
        logger.info(f"Functional values written to {path}.")
    if not result.passed:
        return ExitStatus.NUMERICAL_FAILURE
    return ExitStatus.SUCCESS


def _sweep_point(
    config: dict,
    param: str,
    value: float,
    simulate: bool,
    t_end: Optional[float],
    h: Optional[float],
    log_dir: Optional[str] = None,
    log_level: Optional[str] = None,
) -> list:
    """One row of a sweep. Worker processes pass `log_level` (and
    `log_dir`) to route their own records."""
    if log_level is not None:
        setup_logger(log_dir, log_level)
    scenario = scenario_from_config(config)
    bind_scenario(f"{scenario.name} {param}={value:g}")
    model = scenario.model.with_param(param, value)
    report = classify(model)
    row = [value, report.R0, report.R1, report.regime.label, ""]
    if simulate:
        point = Scenario(
            scenario.name,
            model,
            scenario.history,
            scenario.run,
            scenario.outputs,
            None,
            config,
        )
        trajectory = _simulate(point, t_end, h)
        row[-1] = relative_distance(trajectory.final_state, report.target())
    return row


def run_sweep(args: argparse.Namespace) -> int:
    """Classify (and optionally simulate) the scenario over a range of one
    constant."""
    scenario = _load(args)
    sweep = scenario.sweep
    param = args.param or (sweep.param if sweep else None)
    if args.values is not None:
        try:
            values = [float(_) for _ in args.values.split(",") if _.strip()]
        except ValueError as e:
            raise ScenarioError("sweep", f"Bad --values: {e}") from e
    else:
        values = list(sweep.values) if sweep else []
    if not param:
        raise ScenarioError("sweep", "No parameter to sweep.")
    if not values:
        raise ScenarioError("sweep", "The list of values is empty.")
    simulate = args.simulate or bool(sweep and sweep.simulate)

    # fail fast on a bad parameter name before spawning workers
    scenario.model.with_param(param, values[0])

    jobs = [
        (scenario.config, param, value, simulate, args.t_end, args.h)
        for value in values
    ]
    if args.workers > 1:
        logged = [job + (args.log_dir, args.log_level) for job in jobs]
        with ProcessPoolExecutor(max_workers=args.workers) as executor:
            rows = list(executor.map(_sweep_point, *zip(*logged)))
    else:
        rows = [_sweep_point(*job) for job in jobs]
    bind_scenario(scenario.name)

    header = (param, "R0", "R1", "regime", "final_distance")
    width = max(len(param), 14)
    print("  ".join(f"{_:<{width}}" for _ in header))
    for row in rows:
        print(
            "  ".join(
                f"{_:<{width}.9g}" if isinstance(_, float) else f"{_:<{width}}"
                for _ in row
            ),
        )

    if args.threshold and len(values) > 1:
        for which in ("R0", "R1"):
            try:
                threshold = locate_threshold(
                    scenario.model,
                    param,
                    values[0],
                    values[-1],
                    which,
                )
                print(f"{which} = 1 at {param} = {threshold:.9g}")
            except BracketError:
                print(f"{which} does not cross 1 on the swept range")

    path = _output_path(
        args.out,
        scenario.outputs.sweep,
        _DEFAULT_SWEEP_CSV_NAME,
    )
    if path:
        write_table(path, header, rows)
        logger.info(f"Sweep written to {path}.")
    return ExitStatus.SUCCESS


def run_list(args: argparse.Namespace) -> int:
    """Print the bundled scenario names."""
    for name in bundled_scenarios():
        print(name)
    return ExitStatus.SUCCESS


# ================================ parser ================================


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--h",
        type=float,
        default=None,
        help="integration step, defaults to the scenario's or the "
        "smallest delay over 50",
    )
    parser.add_argument(
        "--t-end",
        type=float,
        default=None,
        help="final time, defaults to the scenario's",
    )


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with all subcommands."""
    parser = argparse.ArgumentParser(
        prog=PACKAGE_NAME,
        description="Equilibria, simulation and Lyapunov audits of a "
        "distributed-delay viral infection model with CTL response.",
    )
    parser.add_argument(
        "--log-level",
        type=str,
        default=_DEFAULT_LOG_LEVEL,
        choices=["TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR"],
        help="logging level",
    )
    parser.add_argument(
        "--log-dir",
        type=str,
        default=None,
        help="directory of the log file, no file is written if not given",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    commands: Dict[str, Callable[[argparse.Namespace], int]] = {
        "equilibria": run_equilibria,
        "simulate": run_simulate,
        "verify": run_verify,
        "sweep": run_sweep,
    }
    for name, handler in commands.items():
        sub = subparsers.add_parser(name, help=handler.__doc__)
        sub.set_defaults(handler=handler)
        sub.add_argument(
            "scenario",
            type=str,
            help="path to a scenario file or name of a bundled scenario",
        )
        sub.add_argument(
            "--out",
            type=str,
            default=None,
            help="output directory",
        )
        if name != "equilibria":
            _add_run_options(sub)
        if name == "simulate":
            sub.add_argument(
                "--no-plot",
                action="store_true",
                help="skip the SVG plot",
            )
        if name == "verify":
            sub.add_argument(
                "--target",
                type=str,
                choices=sorted(_TARGETS),
                default=None,
                help="equilibrium whose functional is audited, defaults to "
                "the one of the regime",
            )
            sub.add_argument(
                "--tol",
                type=float,
                default=_DEFAULT_AUDIT_TOLERANCE,
                help="allowed increase relative to |V| + 1",
            )
            sub.add_argument(
                "--transient",
                type=float,
                default=_DEFAULT_TRANSIENT_FRACTION,
                help="leading share of the time span left out of the audit",
            )
        if name == "sweep":
            sub.add_argument(
                "--param",
                type=str,
                default=None,
                help="constant to sweep, e.g. incidence.beta",
            )
            sub.add_argument(
                "--values",
                type=str,
                default=None,
                help="comma separated values",
            )
            sub.add_argument(
                "--simulate",
                action="store_true",
                help="also integrate every point",
            )
            sub.add_argument(
                "--threshold",
                action="store_true",
                help="locate where R0 and R1 cross one on the swept range",
            )
            sub.add_argument(
                "--workers",
                type=int,
                default=1,
                help="number of worker processes",
            )

    listing = subparsers.add_parser("list", help=run_list.__doc__)
    listing.set_defaults(handler=run_list)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse the command line and run a subcommand.

    Returns:
        `int`: The exit status.
    """
    args = build_parser().parse_args(argv)
    setup_logger(args.log_dir, args.log_level)

    try:
        return int(args.handler(args))
    except (ScenarioError, HypothesisError, AuditConfigError) as e:
        logger.error(str(e))
        return ExitStatus.CONFIGURATION_ERROR
    except VirodynError as e:
        logger.error(str(e))
        return ExitStatus.NUMERICAL_FAILURE
    except (KeyError, ValueError) as e:
        logger.error(f"Invalid input: {e}")
        return ExitStatus.CONFIGURATION_ERROR


def entry() -> None:
    """The console script."""
    sys.exit(main())


if __name__ == "__main__":
    entry()
