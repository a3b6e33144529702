"""
tfnp CLI - solve, decide, certify and cross-check instance documents.

Usage:
    tfnp [-v] [--epsilon Q] [--seed N] [--method M] [--format F] [--cap N] solve INSTANCE
        [--dropped-label L] [--pitch Q] [--retries N] [--iter-cap N]
    tfnp decide INSTANCE --node V [--threshold Q]
    tfnp certify INSTANCE RESULT
    tfnp oracle INSTANCE
    tfnp export-circuit INSTANCE [--variant projection|ratio]

Exit codes: 0 success, 2 schema error, 3 solver error, 4 certification
failure, 5 cap exceeded.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import IO, Any

import click

from .config import Limits
from .core import parse_rational
from .errors import SchemaError, TfnpError
from .instances import parse_instance
from .results import emit_result, parse_result
from .runner import RunOptions, run

logger = logging.getLogger(__name__)

LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


def _rational(ctx: click.Context, param: click.Parameter, value: str | None) -> Fraction | None:
    if value is None:
        return None
    try:
        return parse_rational(value)
    except (ValueError, SchemaError) as exc:
        raise click.BadParameter(str(exc)) from None


@click.group()
@click.version_option(package_name="tfnp")
@click.option("--verbose", "-v", count=True, help="Repeat for more logging (-v info, -vv debug)")
@click.option("--epsilon", default="1/100", callback=_rational, help="Approximation target as 'num/den'")
@click.option("--seed", default=0, type=int, help="Seed for randomized rules and sampling")
@click.option("--method", default=None, help="Solver variant; valid values depend on the instance kind")
@click.option(
    "--format", "output_format", default="json", type=click.Choice(["json", "tsv-summary"]), help="Output format"
)
@click.option("--cap", default=None, type=click.IntRange(min=1), envvar="TFNP_CAP", help="Override the main cap")
@click.option("--timing", is_flag=True, help="Record wall-clock time in the result")
@click.pass_context
def cli(
    ctx: click.Context,
    verbose: int,
    epsilon: Fraction,
    seed: int,
    method: str | None,
    output_format: str,
    cap: int | None,
    timing: bool,
) -> None:
    """tfnp - exact solvers for total search problems and fixed points."""
    logging.basicConfig(
        level=LOG_LEVELS[min(verbose, len(LOG_LEVELS) - 1)],
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.obj = {
        "format": output_format,
        "options": {"epsilon": epsilon, "seed": seed, "method": method, "cap": cap, "timing": timing},
    }


def _execute(ctx: click.Context, instance: IO[str], command: str, **flags: Any) -> None:
    try:
        doc = parse_instance(instance.read())
        options = RunOptions(**ctx.obj["options"], **{k: v for k, v in flags.items() if v is not None})
        result = run(doc, command, options, Limits.from_env())
    except TfnpError as exc:
        click.echo(f"error: {exc}", err=True)
        for name, message in getattr(exc, "fields", {}).items():
            click.echo(f"  {name}: {message}", err=True)
        logger.debug(f"{command} failed with {type(exc).__name__}, exit code {exc.exit_code}")
        ctx.exit(exc.exit_code)
    except ValueError as exc:
        # bad flag values, e.g. a non-positive epsilon
        click.echo(f"error: {exc}", err=True)
        ctx.exit(SchemaError.exit_code)
    click.echo(emit_result(result, ctx.obj["format"]), nl=ctx.obj["format"] == "json")


@cli.command()
@click.argument("instance", type=click.File("r"))
@click.option("--beta", default=None, callback=_rational, help="SSG discount override")
@click.option("--dropped-label", default=None, type=click.IntRange(min=0), help="Lemke-Howson dropped label")
@click.option("--pitch", default=None, callback=_rational, help="Starting grid pitch for path following")
@click.option("--retries", default=None, type=click.IntRange(min=0), help="Pitch refinements for path following")
@click.option("--iter-cap", default=None, type=click.IntRange(min=1), help="Iteration cap for least fixed points")
@click.option("--oracle-check", is_flag=True, default=None, help="Cross-check with the brute-force oracle")
@click.option("--variant", default=None, type=click.Choice(["projection", "ratio"]), help="Nash circuit variant")
@click.pass_context
def solve(
    ctx: click.Context,
    instance: IO[str],
    beta: Fraction | None,
    dropped_label: int | None,
    pitch: Fraction | None,
    retries: int | None,
    iter_cap: int | None,
    oracle_check: bool | None,
    variant: str | None,
) -> None:
    """Solve an instance and print the solution with its certificate."""
    _execute(
        ctx,
        instance,
        "solve",
        beta=beta,
        dropped_label=dropped_label,
        pitch=pitch,
        retries=retries,
        iter_cap=iter_cap,
        oracle_check=oracle_check,
        variant=variant,
    )


@cli.command()
@click.argument("instance", type=click.File("r"))
@click.option("--node", default=None, type=click.IntRange(min=0), help="Node to decide")
@click.option("--threshold", default=None, callback=_rational, help="Value threshold as 'num/den'")
@click.option("--beta", default=None, callback=_rational, help="SSG discount override")
@click.pass_context
def decide(
    ctx: click.Context, instance: IO[str], node: int | None, threshold: Fraction | None, beta: Fraction | None
) -> None:
    """Answer the instance's decision question."""
    _execute(ctx, instance, "decide", node=node, threshold=threshold, beta=beta)


@cli.command()
@click.argument("instance", type=click.File("r"))
@click.argument("result", type=click.File("r"))
@click.pass_context
def certify(ctx: click.Context, instance: IO[str], result: IO[str]) -> None:
    """Re-check the certificate of a previously emitted JSON result."""
    try:
        claimed = parse_result(result.read())
    except ValueError as exc:
        click.echo(f"error: result document is invalid: {exc}", err=True)
        ctx.exit(SchemaError.exit_code)
    _execute(ctx, instance, "certify", claimed=claimed)


@cli.command()
@click.argument("instance", type=click.File("r"))
@click.option("--samples", default=None, type=click.IntRange(min=1), help="Self-map validation samples")
@click.pass_context
def oracle(ctx: click.Context, instance: IO[str], samples: int | None) -> None:
    """Run the brute-force oracle for the instance."""
    _execute(ctx, instance, "oracle", samples=samples)


@cli.command("export-circuit")
@click.argument("instance", type=click.File("r"))
@click.option("--variant", default=None, type=click.Choice(["projection", "ratio"]), help="Nash circuit variant")
@click.pass_context
def export_circuit(ctx: click.Context, instance: IO[str], variant: str | None) -> None:
    """Print the instance as an algebraic circuit."""
    _execute(ctx, instance, "export-circuit", variant=variant)


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
