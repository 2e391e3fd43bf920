"""
Command Line Interface for jetlaw

Provides one subcommand per engine operation plus the corpus regression run.
Reports go to stdout; logging and diagnostics go to stderr.
"""

import sys
from typing import Optional

import click

from jetlaw.commands import COMMANDS, CommandOptions, render, run
from jetlaw.core.config_helpers import ConfigHelpers
from jetlaw.core.config_provider import CentralConfigProvider, ConfigValidationError
from jetlaw.core.errors import JetlawError, describe
from jetlaw.core.logging_manager import LoggingManager
from jetlaw.problem import load_problem, problem_from_expression
from jetlaw.reports import EXIT_CODES

USAGE_ERROR = EXIT_CODES["error"]


@click.group()
@click.option(
    "--config",
    "-c",
    multiple=True,
    help="Configuration file path (can be specified multiple times)",
)
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose logging")
@click.option("--seed", type=int, default=None, help="Probe seed (default 0)")
@click.option("--probes", type=int, default=None, help="Probe count K (default 16)")
@click.option("--tol", type=float, default=None, help="Probe tolerance (default 1e-9)")
@click.option("--max-order", type=int, default=None, help="Hodograph order (default 3)")
@click.option(
    "--ranking",
    type=click.Choice(["grlex", "lex"]),
    default=None,
    help="Default ranking strategy (default grlex)",
)
@click.pass_context
def cli(ctx, config, verbose, seed, probes, tol, max_order, ranking):
    """jetlaw - conservation laws, multipliers and reductions of PDE systems"""

    config_files = list(config) if config else ConfigHelpers.default_config_files()
    config_provider: Optional[CentralConfigProvider] = None
    try:
        if config_files:
            config_provider = CentralConfigProvider(config_files)
            config_provider.initialize()
    except ConfigValidationError as e:
        click.echo(f"Configuration error: {e}", err=True)
        sys.exit(USAGE_ERROR)

    # Initialize logging first (before any engine work)
    logging_config = ConfigHelpers.get_logging_config(config_provider, verbose)
    logging_manager = LoggingManager(logging_config)
    logging_manager.initialize_logging()
    logger = logging_manager.get_logger("jetlaw.cli")
    logger.debug("jetlaw CLI starting with config files %s", config_files)

    try:
        settings = ConfigHelpers.build_engine_settings(
            config_provider,
            {
                "seed": seed,
                "probes": probes,
                "tol": tol,
                "max_order": max_order,
                "ranking": ranking,
            },
        )
    except ConfigValidationError as e:
        click.echo(f"Configuration error: {e}", err=True)
        sys.exit(USAGE_ERROR)

    ctx.ensure_object(dict)
    ctx.obj["config_provider"] = config_provider
    ctx.obj["logger"] = logger
    ctx.obj["logging_manager"] = logging_manager
    ctx.obj["settings"] = settings


def _execute(
    ctx, command: str, file: Optional[str], options: CommandOptions, independent: str
):
    logger = ctx.obj["logger"]
    settings = ctx.obj["settings"]
    try:
        if file is not None:
            problem = load_problem(
                file, max_depth=settings.max_depth, ranking=settings.ranking
            )
        elif options.expr_text is not None:
            names = [x.strip() for x in independent.split(",") if x.strip()]
            problem = problem_from_expression(options.expr_text, names)
        else:
            raise click.UsageError(f"{command} needs a problem FILE or --expr")
        report = run(command, problem, options, settings)
    except JetlawError as e:
        logger.debug("command %s failed", command, exc_info=True)
        click.echo(describe(e, command), err=True)
        sys.exit(USAGE_ERROR)
    except OSError as e:
        click.echo(f"{command}: cannot read {file}: {e.strerror}", err=True)
        sys.exit(USAGE_ERROR)
    click.echo(render(report))
    sys.exit(report.exit_code)


def _file_command(
    name: str, help_text: str, with_expr: bool = False, with_var: bool = False
):
    """Register a subcommand taking a problem FILE and optional item NAMES."""

    @click.argument(
        "file", type=click.Path(dir_okay=False), required=not (with_expr or with_var)
    )
    @click.argument("names", nargs=-1)
    @click.pass_context
    def command(ctx, file, names, **kwargs):
        options = CommandOptions(
            names=list(names),
            var=kwargs.get("var"),
            expr_text=kwargs.get("expr"),
            candidate=kwargs.get("candidate"),
        )
        _execute(ctx, name, file, options, kwargs.get("independent") or "x,y,t")

    if with_expr:
        command = click.option(
            "--expr", "-e", default=None, help="Expression in the problem's variables"
        )(command)
        command = click.option(
            "--independent",
            default="x,y,t",
            show_default=True,
            help="Independent variables when no FILE is given",
        )(command)
    if with_var:
        command = click.option(
            "--var", default=None, help="Variable to differentiate by"
        )(command)
    if name == "det-eqs":
        command = click.option(
            "--candidate", default=None, help="Candidate solution to substitute"
        )(command)
    command.__doc__ = help_text
    cli.command(name=name)(command)


_HELP = {
    "normalize": "Canonical form of a problem file or of --expr, with the orthonomic check.",
    "dx": "Total derivative D_var of --expr.",
    "euler": "Euler operator E_var of --expr; with FILE, compare against the system.",
    "reduce": "Normal form of --expr on solutions of the system.",
    "verify-cl": "Check that each conservation law vanishes on solutions.",
    "char-form": "Characteristic form (multiplier) of a conservation law.",
    "verify-multiplier": "Check that Q.A is a total divergence.",
    "det-eqs": "Determining equations for a multiplier ansatz with an unknown function.",
    "bridge": "Check the lambda bridge for a family constrained in its arbitrary functions.",
    "solve-lambda": "Solve the lambda bridge for the constraint multipliers.",
    "clambda": "Construct C_lambda, verify it, optionally compare with a second claw.",
    "equiv": "Triviality of one claw, or equivalence of two.",
    "syzygy": "Check each declared syzygy as an identity.",
    "first-integral": "First integral from a law with one nonzero flux.",
    "symmetry": "Check generalized symmetries of the system.",
    "variational": "Check that symmetries are variational for the Lagrangian.",
    "noether": "Variational symmetry and multiplier checks side by side.",
    "hodograph": "Transform a conservation law by the declared hodograph swap.",
}

for _name in COMMANDS:
    _file_command(
        _name,
        _HELP[_name],
        with_expr=_name
        in {"normalize", "dx", "euler", "reduce", "first-integral", "det-eqs"},
        with_var=_name in {"dx", "euler"},
    )


@cli.command()
@click.argument("directory", required=False, type=click.Path(exists=True))
@click.option("--jobs", "-j", type=int, default=None, help="Parallel workers")
@click.option(
    "--report-dir",
    type=click.Path(file_okay=False),
    default=None,
    help="Write checks.jsonl and corpus_summary.json here",
)
@click.pass_context
def corpus(ctx, directory, jobs, report_dir):
    """Run every check of the bundled (or given) corpus"""
    from jetlaw.corpus import run_corpus

    settings = ctx.obj["settings"]
    try:
        result = run_corpus(directory, settings, report_dir, jobs)
    except FileNotFoundError as e:
        click.echo(f"corpus: {e}", err=True)
        sys.exit(USAGE_ERROR)

    for outcome in result.outcomes:
        mark = "ok" if outcome.passed else "FAIL"
        click.echo(f"{mark:4} {outcome.file}:{outcome.line} {outcome.check} -> {outcome.result}")
    summary = result.summary
    click.echo(f"corpus: {summary.passed}/{summary.total_checks} checks passed")
    lines = [
        "command: corpus",
        f"files: {len(summary.files)}",
        f"checks: {summary.total_checks}",
        f"passed: {summary.passed}",
        f"failed: {summary.failed}",
        f"seed: {summary.seed}",
        f"result: {'verified' if result.passed else 'refuted'}",
    ]
    lines += [f"failure: {f}" for f in summary.failures]
    click.echo("```jetlaw\n" + "\n".join(lines) + "\n```")
    if result.passed:
        sys.exit(0)
    if summary.total_checks == 0:
        sys.exit(USAGE_ERROR)
    sys.exit(EXIT_CODES["refuted"])


def main():
    """Main entry point for CLI"""
    cli(obj={})


if __name__ == "__main__":
    main()
