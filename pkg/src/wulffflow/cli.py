"""Command line front end: run presets, sweep cylinder radii, self-check."""

from __future__ import annotations

import dataclasses
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, anisotropy, experiments, geometry, numerics, stepper
from .anisotropy import AnisotropyModel
from .experiments import (
    CosineInitial,
    FlowConfig,
    HermiteInitial,
    Pinched,
    preset,
    run as run_flow,
    write_outputs,
)
from .numerics import QuadratureRule
from .spline import ClampedSpline
from .stepper import FlowState


def _parse_initial(spec: str):
    kind, _, rest = spec.partition(":")
    try:
        parts = [float(p) for p in rest.split(",")] if rest else []
        if kind == "hermite" and len(parts) == 2:
            return HermiteInitial(parts[0], parts[1])
        if kind == "cosine" and len(parts) == 3:
            return CosineInitial(parts[0], parts[1], int(parts[2]))
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from exc
    raise click.BadParameter(
        f"cannot parse initial profile {spec!r}; expected "
        "hermite:R0,R1 or cosine:MEAN,AMPLITUDE,WAVENUMBER"
    )


def _parse_radii(spec: str):
    try:
        lo, hi, step_ = (float(p) for p in spec.split(":"))
    except ValueError as exc:
        raise click.BadParameter(
            f"cannot parse radius range {spec!r}; expected LO:HI:STEP"
        ) from exc
    if step_ <= 0 or hi < lo:
        raise click.BadParameter("need LO <= HI and STEP > 0")
    count = int(math.floor((hi - lo) / step_ + 1e-9)) + 1
    return [lo + i * step_ for i in range(count)]


@click.group()
@click.version_option(version=__version__)
def main():
    """Simulate constrained anisotropic curvature flow of a trapped drop."""


@main.command("run")
@click.option("--preset", "preset_name", type=click.Choice(experiments.PRESET_NAMES),
              default=None, help="Named experiment configuration.")
@click.option("--epsilon", type=float, default=None, help="Anisotropy strength.")
@click.option("--n", "n_intervals", type=int, default=None, help="Grid intervals.")
@click.option("--tau", type=float, default=None, help="Time step.")
@click.option("--horizon", type=float, default=None, help="Final time.")
@click.option("--init", "initial_spec", type=str, default=None,
              help="Initial profile, hermite:R0,R1 or cosine:MEAN,AMP,WAVENUMBER.")
@click.option("--quad-points", type=int, default=None, help="Gauss points per interval.")
@click.option("--steady-tol", type=float, default=None,
              help="Steady-state threshold on max|dr|/tau.")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
def run_command(preset_name, epsilon, n_intervals, tau, horizon, initial_spec,
                quad_points, steady_tol, out_dir):
    """Run one flow simulation and write history, snapshots and manifest."""
    if preset_name is not None:
        config = preset(preset_name)
        overrides = {}
        if epsilon is not None:
            overrides["epsilon"] = epsilon
        if n_intervals is not None:
            overrides["n_intervals"] = n_intervals
        if tau is not None:
            overrides["tau"] = tau
        if horizon is not None:
            overrides["horizon"] = horizon
        if initial_spec is not None:
            overrides["initial"] = _parse_initial(initial_spec)
        if quad_points is not None:
            overrides["quad_points"] = quad_points
        if steady_tol is not None:
            overrides["steady_tolerance"] = steady_tol
        if overrides:
            overrides["notes"] = config.notes + tuple(
                f"preset {preset_name} override: {k}" for k in sorted(overrides)
            )
            config = dataclasses.replace(config, **overrides)
    else:
        missing = [name for name, value in (
            ("--epsilon", epsilon), ("--n", n_intervals), ("--tau", tau),
            ("--horizon", horizon), ("--init", initial_spec))
            if value is None]
        if missing:
            raise click.UsageError(
                "without --preset, provide " + ", ".join(missing)
            )
        config = FlowConfig(
            epsilon=epsilon,
            n_intervals=n_intervals,
            tau=tau,
            horizon=horizon,
            initial=_parse_initial(initial_spec),
            quad_points=quad_points or 4,
            steady_tolerance=steady_tol if steady_tol is not None else 1e-6,
        )

    history = run_flow(config)
    write_outputs(history, config, out_dir)
    outcome = history.outcome
    click.echo(f"outcome: {outcome.kind}")
    if history.volume.size:
        v0 = history.volume[0]
        drift = np.max(np.abs(history.volume - v0)) / v0 * 100.0
        click.echo(f"initial volume: {v0:.6f}")
        click.echo(f"volume drift: {drift:.3g} %")
        click.echo(f"final energy: {history.energy[-1]:.6f}")
    if isinstance(outcome, Pinched):
        click.echo(f"pinched at t={outcome.time:.6f}, z={outcome.z_location:.4f}")
        sys.exit(2)


@main.command("sweep")
@click.option("--epsilon", type=float, required=True)
@click.option("--radii", "radii_spec", type=str, required=True,
              help="Cylinder radii to scan, LO:HI:STEP.")
@click.option("--perturb", type=float, default=0.01, show_default=True,
              help="Amplitude of the cos(2 pi z) perturbation.")
@click.option("--n", "n_intervals", type=int, default=100, show_default=True)
@click.option("--tau", type=float, default=1e-4, show_default=True)
@click.option("--horizon", type=float, default=3.0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
def sweep_command(epsilon, radii_spec, perturb, n_intervals, tau, horizon, out_dir):
    """Classify perturbed cylinders on both sides of the stability threshold."""
    radii = _parse_radii(radii_spec)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    threshold = geometry.stability_threshold(AnisotropyModel(epsilon))
    rows = ["radius,outcome,final_min_radius,threshold_radius"]
    for radius in radii:
        config = FlowConfig(
            epsilon=epsilon,
            n_intervals=n_intervals,
            tau=tau,
            horizon=horizon,
            initial=CosineInitial(radius, perturb, 2),
        )
        cell_dir = out_dir / f"r_{radius:.4f}"
        history = run_flow(config)
        write_outputs(history, config, cell_dir)
        final_min = history.min_radius[-1] if history.min_radius.size else float("nan")
        rows.append(
            f"{radius:.17g},{history.outcome.kind},{final_min:.17g},{threshold:.17g}"
        )
        click.echo(f"r={radius:.4f}: {history.outcome.kind}")
    (out_dir / "summary.csv").write_text("\n".join(rows) + "\n")
    click.echo(f"threshold radius: {threshold:.4f}")


def _self_checks():
    model = AnisotropyModel(0.2)
    quad = QuadratureRule.gauss_legendre(4)

    def density_derivatives():
        grid = np.linspace(-1 + 1e-3, 1 - 1e-3, 101)
        h = 1e-5
        fd1 = (anisotropy.gamma(model, grid + h) - anisotropy.gamma(model, grid - h)) / (2 * h)
        assert np.allclose(fd1, anisotropy.gamma_d1(model, grid), rtol=1e-8, atol=1e-8)

    def convexity_interval():
        for eps in np.linspace(-1.0, 1.5, 101):
            assert anisotropy.check_convexity(eps) == (-0.5 < eps < 1.0)

    def quadrature_exactness():
        val = numerics.integrate(quad, lambda z: z ** 7, [0.0, 1.0])
        assert abs(val - 0.125) < 1e-14

    def spline_cubic_reproduction():
        nodes = np.linspace(0, 1, 11)
        sp = ClampedSpline.fit(nodes, nodes ** 3, 0.0, 3.0)
        zz = np.linspace(0, 1, 201)
        assert np.max(np.abs(sp(zz) - zz ** 3)) < 1e-12

    def cylinder_fixed_point():
        nodes = np.linspace(0, 1, 33)
        sp = ClampedSpline.fit(nodes, np.full(33, 0.5), 0.0, 0.0)
        state = FlowState(0.0, sp, 0)
        new = stepper.step(model, state, 1e-3, quad)
        assert np.max(np.abs(new.spline.values - 0.5)) < 1e-11

    def threshold_value():
        assert abs(geometry.stability_threshold(model) - 0.3766) < 1e-4

    return [
        ("density derivatives vs finite differences", density_derivatives),
        ("convexity matches the closed-form interval", convexity_interval),
        ("quadrature degree-7 exactness", quadrature_exactness),
        ("spline cubic reproduction", spline_cubic_reproduction),
        ("cylinder is a fixed point of the stepper", cylinder_fixed_point),
        ("cylinder stability threshold value", threshold_value),
    ]


@main.command("check")
def check_command():
    """Run the quick invariant suite."""
    failures = 0
    for name, fn in _self_checks():
        try:
            fn()
        except AssertionError:
            failures += 1
            click.echo(f"FAIL  {name}")
        else:
            click.echo(f"ok    {name}")
    if failures:
        sys.exit(1)
    click.echo("all checks passed")


if __name__ == "__main__":
    main()
