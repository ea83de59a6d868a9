"""Configuration-driven command line: spectrum | compare | classical | evolve | validate.

Exit codes: 0 success, 1 validation-suite failure, 2 invalid configuration,
3 solver non-convergence, 4 physics error (mass positivity). Wall-clock
timings go to a separate timings.json so the contractual outputs stay
byte-identical for identical config and seed.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .classical import ClassicalState, TrajectoryAborted, integrate_trajectory
from .config import ConfigError, RunConfig, load_config
from .evolution import ehrenfest_check
from .grid import make_grid_1d
from .operators import (
    ORDERING_PRESETS,
    MassPositivityError,
    build_corrected_hamiltonian,
    build_dutra_oliveira_hamiltonian,
    build_expanded_hamiltonian,
    build_von_roos,
    make_ordering,
)
from .reports import (
    render_comparison_figure,
    render_spectrum_figure,
    render_timeseries_figure,
    render_trajectory_figure,
    write_json,
    write_spectrum_csv,
    write_timeseries_csv,
    write_trajectory_csv,
)
from .spectral import SolverConvergenceError, SolverError, compare_spectra, solve_lowest

EXIT_OK = 0
EXIT_SUITE_FAILED = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_PHYSICS = 4


def _ordering_from_spec(spec):
    if isinstance(spec, str):
        return ORDERING_PRESETS[spec]
    return make_ordering(spec["alpha"], spec["beta"], spec["gamma"])


def build_named_hamiltonian(name: str, grid, cfg: RunConfig, ordering=None):
    """Assemble one of the four Hamiltonians; returns (operator, diagnostics)."""
    mass = cfg.mass()
    potential = cfg.potential()
    gauge = cfg.gauge()
    constants = cfg.constants()
    ordering = ordering if ordering is not None else cfg.ordering()
    diag = {"builder": name}
    if name == "von_roos":
        op = build_von_roos(grid, mass, ordering, potential, constants)
        diag["ordering"] = [ordering.alpha, ordering.beta, ordering.gamma]
    elif name == "corrected":
        op = build_corrected_hamiltonian(grid, mass, gauge, potential, constants)
    elif name == "expanded":
        if gauge is None:
            raise ConfigError("spectrum.builder 'expanded' requires a gauge block")
        pair = build_expanded_hamiltonian(grid, mass, gauge, potential, constants)
        diag["hermiticity_defect_literal"] = pair.literal.hermiticity_defect
        diag["literal_max_entry"] = pair.literal.max_entry()
        op = pair.symmetrized
    elif name == "dutra_oliveira":
        if gauge is None:
            raise ConfigError("spectrum.builder 'dutra_oliveira' requires a gauge block")
        op = build_dutra_oliveira_hamiltonian(grid, mass, gauge, potential, ordering, constants)
        diag["ordering"] = [ordering.alpha, ordering.beta, ordering.gamma]
    else:
        raise ConfigError(f"unknown builder {name!r}")
    diag["hermiticity_defect"] = op.hermiticity_defect
    diag["max_entry"] = op.max_entry()
    return op, diag


def _solve(cfg: RunConfig, op, k=None):
    s = cfg.solver()
    return solve_lowest(op, k or s["k"], method=s["method"], tol=s["tol"], seed=s["seed"])


def cmd_spectrum(cfg: RunConfig, out: Path, plot: bool = False) -> dict:
    grid = cfg.grid()
    builder = cfg.resolved["spectrum"]["builder"]
    t0 = time.perf_counter()
    op, diag = build_named_hamiltonian(builder, grid, cfg)
    t_build = time.perf_counter() - t0
    t0 = time.perf_counter()
    spectrum = _solve(cfg, op)
    t_solve = time.perf_counter() - t0

    out.mkdir(parents=True, exist_ok=True)
    write_spectrum_csv(out / "spectrum.csv", spectrum)
    payload = {
        "config": cfg.resolved,
        "builder_diagnostics": diag,
        "grid": {"dim": grid.dim, "hx": grid.hx, "hy": grid.hy},
        "solver": {
            "method": spectrum.method,
            "iterations": spectrum.iterations,
            "max_residual": float(spectrum.residuals.max()),
            "orthogonality_defect": spectrum.orthogonality_defect(),
        },
        "eigenvalues": [float(e) for e in spectrum.eigenvalues],
    }
    write_json(out / "diagnostics.json", payload)
    write_json(out / "timings.json", {"build_seconds": t_build, "solve_seconds": t_solve})
    if cfg.resolved["spectrum"]["dump_operator"]:
        op.dump_coo(str(out / "operator.txt"))
    if plot:
        render_spectrum_figure(out / "spectrum.png", spectrum, f"{builder} spectrum")
    return payload


def compare_report(cfg: RunConfig) -> dict:
    """Solve both targets at the configured and the coarsened grid; verdict.

    A level is "distinct" when the energy gap between the two constructions
    exceeds 5x the per-level discretization error estimated from one grid
    refinement step (fine-vs-half-resolution difference, the larger of the
    two targets).
    """
    grid = cfg.grid()
    coarse = cfg.coarse_grid()
    block = cfg.resolved["compare"]
    if "builders" in block:
        targets = [(name, None) for name in block["builders"]]
        labels = block["builders"]
    else:
        orderings = [_ordering_from_spec(o) for o in block["orderings"]]
        targets = [("von_roos", o) for o in orderings]
        labels = [
            o if isinstance(o, str) else f"({o['alpha']},{o['beta']},{o['gamma']})"
            for o in block["orderings"]
        ]

    k = cfg.solver()["k"]
    fine_spectra, coarse_spectra, diags = [], [], []
    for name, ordering in targets:
        op, diag = build_named_hamiltonian(name, grid, cfg, ordering)
        fine_spectra.append(_solve(cfg, op))
        diags.append(diag)
        op_c, _ = build_named_hamiltonian(name, coarse, cfg, ordering)
        coarse_spectra.append(_solve(cfg, op_c))

    report = compare_spectra(fine_spectra[0], fine_spectra[1], k)
    err = [
        np.abs(fine_spectra[i].eigenvalues[:k] - coarse_spectra[i].eigenvalues[:k])
        for i in (0, 1)
    ]
    thresholds = 5.0 * np.maximum(err[0], err[1])
    gaps = np.array([lvl.abs_diff for lvl in report.levels])
    distinct = bool(np.any(gaps > thresholds))
    payload = report.to_dict()
    payload.update(
        {
            "config": cfg.resolved,
            "labels": labels,
            "builder_diagnostics": diags,
            "refinement_errors": [[float(x) for x in e] for e in err],
            "thresholds": [float(t) for t in thresholds],
            "coarse_grid": {"nx": coarse.nx, "ny": coarse.ny},
            "verdict": "distinct" if distinct else "indistinguishable at this resolution",
        }
    )
    return payload


def cmd_compare(cfg: RunConfig, out: Path, plot: bool = False) -> dict:
    payload = compare_report(cfg)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "comparison.json", payload)
    if plot:
        title = " vs ".join(payload["labels"])
        render_comparison_figure(out / "comparison.png", payload, title)
    return payload


def cmd_classical(cfg: RunConfig, out: Path, plot: bool = False) -> dict:
    blk = cfg.resolved["classical"]
    state0 = ClassicalState(*blk["state0"])
    traj = integrate_trajectory(
        state0,
        cfg.mass(),
        cfg.gauge(),
        cfg.potential(),
        cfg.constants(),
        t_end=blk["t_end"],
        dt=blk["dt"],
    )
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(out / "trajectory.csv", traj)
    e0 = traj.energies[0]
    escale = max(abs(e0), np.finfo(float).tiny)
    pi2 = traj.pseudo_momenta[:, 0] ** 2 + traj.pseudo_momenta[:, 1] ** 2
    pscale = max(abs(pi2[0]), np.finfo(float).tiny)
    payload = {
        "config": cfg.resolved,
        "samples": int(len(traj.times)),
        "energy_drift_rel": float(np.abs(traj.energies - e0).max() / escale),
        "pseudo_momentum_sq_drift_rel": float(np.abs(pi2 - pi2[0]).max() / pscale),
        "pseudo_momentum_component_drift": [
            float(np.abs(traj.pseudo_momenta[:, j] - traj.pseudo_momenta[0, j]).max())
            for j in (0, 1)
        ],
        "final_state": {
            "t": float(traj.times[-1]),
            "x": float(traj.states[-1, 0]),
            "y": float(traj.states[-1, 1]),
            "px": float(traj.states[-1, 2]),
            "py": float(traj.states[-1, 3]),
        },
    }
    write_json(out / "conservation.json", payload)
    if plot:
        render_trajectory_figure(out / "trajectory.png", traj, "classical trajectory")
    return payload


def cmd_evolve(cfg: RunConfig, out: Path, plot: bool = False) -> dict:
    blk = cfg.resolved["evolve"]
    grid = make_grid_1d(blk["n"], blk["bounds"])
    report = ehrenfest_check(
        cfg.mass(),
        cfg.potential(),
        grid,
        blk["packet"],
        blk["dt"],
        blk["steps"],
        cfg.constants(),
    )
    out.mkdir(parents=True, exist_ok=True)
    write_timeseries_csv(out / "timeseries.csv", report.pdm_series)
    write_timeseries_csv(out / "timeseries_reference.csv", report.const_series)
    payload = {
        "config": cfg.resolved,
        "r_const": report.r_const,
        "r_naive": report.r_naive,
        "norm_drift_pdm": float(np.abs(report.pdm_series.norms - 1.0).max()),
        "energy_drift_rel_pdm": float(
            np.abs(report.pdm_series.energies - report.pdm_series.energies[0]).max()
            / max(abs(report.pdm_series.energies[0]), np.finfo(float).tiny)
        ),
    }
    write_json(out / "ehrenfest.json", payload)
    if plot:
        render_timeseries_figure(out / "timeseries.png", report.pdm_series, "wavepacket expectations")
    return payload


def cmd_validate(list_only: bool = False, criteria: list[str] | None = None) -> int:
    from .acceptance import CRITERIA, run_all

    if list_only:
        for cid, title, _ in CRITERIA:
            print(f"{cid}  {title}")
        return EXIT_OK
    results = run_all(only=criteria)
    width = max(len(r.title) for r in results)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.cid}  {r.title:<{width}}  ({r.seconds:6.1f}s)  {r.detail}")
        failed += not r.passed
    print(f"{len(results) - failed}/{len(results)} criteria passed")
    return EXIT_OK if failed == 0 else EXIT_SUITE_FAILED


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pdmlab",
        description="Spectra, comparisons, classical trajectories, and wavepacket "
        "checks for position-dependent-mass particles in magnetic fields.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("spectrum", "solve one Hamiltonian and write its spectrum"),
        ("compare", "solve two constructions and report per-level differences"),
        ("classical", "integrate a classical trajectory"),
        ("evolve", "propagate a 1D wavepacket and run the momentum-relation check"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="path to the JSON run configuration")
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--plot", action="store_true", help="render PNG figures next to the reports")
    sv = sub.add_parser("validate", help="run the acceptance suite")
    sv.add_argument("--list", action="store_true", help="list criteria without running")
    sv.add_argument("--only", nargs="*", default=None, help="run only these criterion ids")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(list_only=args.list, criteria=args.only)
        cfg = load_config(args.config, args.command)
        out = Path(args.out)
        handler = {
            "spectrum": cmd_spectrum,
            "compare": cmd_compare,
            "classical": cmd_classical,
            "evolve": cmd_evolve,
        }[args.command]
        handler(cfg, out, plot=args.plot)
        return EXIT_OK
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver request error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverConvergenceError as exc:
        print(f"solver failed to converge: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (MassPositivityError, TrajectoryAborted) as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    sys.exit(main())
