"""Command-line entry point: ``stabilizer run | validate-config | demo``."""

from __future__ import annotations

import json
import logging
import sys

import click

from .exceptions import ConfigError
from .harness.config import ExperimentConfig, load_config
from .harness.experiment import run_experiment
from .harness.output import summary, write_outputs

EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _execute(config: ExperimentConfig, out_dir):
    out_dir = out_dir or config.out_dir or "results"
    try:
        result = run_experiment(config)
        paths = write_outputs(result, out_dir)
    except Exception as exc:  # noqa: BLE001 - mapped to the runtime exit code
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    summ = summary(result)
    for arm, stats in summ["arms"].items():
        mean = "n/a" if stats["mean"] is None else f"{stats['mean']:.4f}"
        std = "n/a" if stats["std"] is None else f"{stats['std']:.4f}"
        click.echo(f"{arm:12s} mean={mean} std={std} failed={stats['failed_runs']}")
    if "adaptive_wins_vs_unmitigated" in summ:
        click.echo(
            f"adaptive beat unmitigated in {summ['adaptive_wins_vs_unmitigated']}/{config.runs} runs"
        )
    click.echo(f"wrote {', '.join(str(p) for p in paths.values())}")


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log per-run warnings.")
def main(verbose):
    """Drifting-noise simulation, Bayesian channel inference and adaptive mitigation."""
    logging.basicConfig(level=logging.INFO if verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")


def _arms(ctx, param, value):
    if value is None:
        return None
    return tuple(a.strip() for a in value.split(",") if a.strip())


@main.command()
@click.option("--config", "config_path", type=click.Path(), required=True)
@click.option("--seed", type=int)
@click.option("--runs", type=int)
@click.option("--shots", type=int)
@click.option("--chain-steps", type=int)
@click.option("--arms", callback=_arms, help="Comma-separated subset of unmitigated,static,adaptive.")
@click.option("--prior", type=click.Choice(["uniform", "configured", "sequential"]))
@click.option("--out", "out_dir", type=click.Path(file_okay=False))
def run(config_path, seed, runs, shots, chain_steps, arms, prior, out_dir):
    """Run the experiment described by a YAML configuration file."""
    try:
        config = load_config(config_path).with_overrides(
            seed=seed, runs=runs, shots=shots, chain_steps=chain_steps, arms=arms, prior=prior,
        )
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    _execute(config, out_dir)


@main.command("validate-config")
@click.argument("path", type=click.Path())
def validate_config(path):
    """Check a configuration file and print the resolved settings."""
    try:
        config = load_config(path)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    click.echo(json.dumps(config.to_dict(), indent=2))


@main.command()
@click.option("--seed", type=int, default=2022, show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="results", show_default=True)
def demo(seed, out_dir):
    """Three-arm comparison with the default 4-qubit drift settings."""
    _execute(ExperimentConfig(seed=seed), out_dir)


if __name__ == "__main__":
    main()
