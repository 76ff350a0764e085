"""Command-line front end.

Verbs: solve | dirichlet | nullspace | hmeasure | map.  Every command reads
one problem document (a JSON file or a builtin name), writes its artifacts
into --out, and finishes with a run manifest listing every tolerance and
schedule that influenced the output plus content hashes of the artifacts.
Outputs are deterministic: identical input and version give byte-identical
JSON/CSV artifacts.

Exit codes: 0 ok, 2 schema error, 3 solver overflow, 4 map non-convergence,
5 verification thresholds violated.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .core import (RHProblem, SolverOverflowError, family_evaluator,
                   null_generators, solve)
from .dirichlet import solve_direct, solve_gehring
from .jordan import (MapConvergenceError, harmonic_measure,
                     harmonic_measure_quadrature, transport_problem)
from .problemfile import (ProblemFile, ProblemFileError, build_disk_problem,
                          build_map, build_phi_trace, eval_expression, load)
from .spectral import CircleGrid
from .verify import boundary_residual

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_OVERFLOW = 3
EXIT_MAP = 4
EXIT_THRESHOLD = 5


class ThresholdError(RuntimeError):
    """A configured verification threshold was violated."""


def _write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_long_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("series", "x", "y"))
        for series, x, y in rows:
            writer.writerow((series, repr(float(x)), repr(float(y))))


def _coeff_list(f) -> list:
    return [[float(c.real), float(c.imag)] for c in f.a]


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(outdir, command, pf: ProblemFile, seed, artifacts, extra=None) -> None:
    manifest = {
        "version": __version__,
        "command": command,
        "seed": seed,
        "problem": pf.describe(),
        "artifacts": {name: _sha256(os.path.join(outdir, name)) for name in artifacts},
    }
    if extra:
        manifest.update(extra)
    _write_json(os.path.join(outdir, "manifest.json"), manifest)


def _check_thresholds(pf: ProblemFile, report) -> None:
    th = pf.verify.thresholds
    if "l1_deepest" in th and report.l1[-1] > th["l1_deepest"]:
        raise ThresholdError(
            f"L1 residual {report.l1[-1]:.3e} at r={report.radii[-1]} exceeds "
            f"threshold {th['l1_deepest']:.3e}")
    if "linf_deepest" in th and report.linf[-1] > th["linf_deepest"]:
        raise ThresholdError(
            f"Linf residual {report.linf[-1]:.3e} at r={report.radii[-1]} exceeds "
            f"threshold {th['linf_deepest']:.3e}")


def _data_functions(pf: ProblemFile):
    """lambda/phi as callables of the boundary parameter, for Jordan domains."""
    if pf.lam_spec is None or pf.phi_spec is None:
        raise ProblemFileError("this command needs both lambda and phi data")
    if isinstance(pf.lam_spec, dict) or isinstance(pf.phi_spec, dict):
        raise ProblemFileError("piecewise data is only supported on the disk domain")

    def make(spec):
        if isinstance(spec, str):
            return lambda s: eval_expression(spec, np.asarray(s, dtype=float))
        if isinstance(spec, list):
            z = complex(spec[0], spec[1])
            return lambda s: np.full(np.asarray(s).shape, z)
        return lambda s: np.full(np.asarray(s).shape, float(spec))

    return make(pf.lam_spec), make(pf.phi_spec)


def cmd_solve(pf: ProblemFile, outdir: str, plot: bool, seed: int, verbose: bool) -> int:
    grid = CircleGrid(pf.n)
    domain_kind = pf.domain["kind"]
    if domain_kind == "disk":
        problem = build_disk_problem(pf)
    elif domain_kind in ("polynomial", "theodorsen"):
        cmap, boundary = build_map(pf, grid)
        lam_fn, phi_fn = _data_functions(pf)
        problem = transport_problem(lam_fn, phi_fn, cmap, boundary, grid,
                                    pf.declared_jumps)
    else:
        raise ProblemFileError(f"domain kind {domain_kind!r} cannot be solved on")
    solution = solve(problem, pf.route, pf.growth_bound)

    report = boundary_residual(solution, problem, pf.verify.radii,
                               pf.verify.exclusion_radius)

    _write_json(os.path.join(outdir, "solution.json"), {
        "kind": "solve", "n": pf.n, "route": pf.route, "domain": pf.domain,
        "coefficients": {"f": _coeff_list(solution.f),
                         "A": _coeff_list(solution.A),
                         "B": _coeff_list(solution.B)},
    })
    theta = grid.theta
    rows = []
    for name, vals in (("phi", problem.phi.values),
                       ("alpha", solution.alpha.values),
                       ("beta", solution.beta.values),
                       ("b_boundary", solution.b_boundary.values),
                       ("lambda_re", problem.lam.values.real),
                       ("lambda_im", problem.lam.values.imag)):
        rows.extend((name, t, v) for t, v in zip(theta, vals))
    _write_long_csv(os.path.join(outdir, "traces.csv"), rows)
    report.write_csv(os.path.join(outdir, "residuals.csv"))
    _write_manifest(outdir, "solve", pf, seed,
                    ("solution.json", "traces.csv", "residuals.csv"),
                    {"residual_summary": report.to_dict()})

    if plot:
        from . import plots
        plots.plot_residuals(report, os.path.join(outdir, "residuals.png"))
        plots.plot_traces(theta, {"phi": problem.phi.values,
                                  "alpha": solution.alpha.values,
                                  "beta": solution.beta.values,
                                  "b_boundary": solution.b_boundary.values},
                          os.path.join(outdir, "traces.png"))
    if verbose:
        for r, l1, linf in zip(report.radii, report.l1, report.linf):
            print(f"r={r:.12g}  L1={l1:.6e}  Linf={linf:.6e}")
    _check_thresholds(pf, report)
    return EXIT_OK


def cmd_dirichlet(pf: ProblemFile, outdir: str, plot: bool, seed: int, verbose: bool) -> int:
    if pf.phi_spec is None:
        raise ProblemFileError("the dirichlet command needs phi data")
    if pf.domain["kind"] != "disk":
        raise ProblemFileError("the dirichlet command runs on the disk domain")
    grid = CircleGrid(pf.n)
    phi = build_phi_trace(pf, grid)

    u_direct = solve_direct(phi)
    u_gehring = solve_gehring(phi)
    rows = []
    summary = {"u0_direct": u_direct.at_zero(), "u0_gehring": u_gehring.at_zero(),
               "phi_mean": float(phi.values.mean()), "per_radius": []}
    for r in pf.verify.radii:
        vd = u_direct.circle_values(r, grid)
        vg = u_gehring.circle_values(r, grid)
        diff = np.abs(vd - vg)
        rows.extend((f"direct r={r:.12g}", t, v) for t, v in zip(grid.theta, vd))
        rows.extend((f"gehring r={r:.12g}", t, v) for t, v in zip(grid.theta, vg))
        rows.extend((f"diff r={r:.12g}", t, v) for t, v in zip(grid.theta, diff))
        summary["per_radius"].append({"r": r, "max_diff": float(diff.max()),
                                      "mean_diff": float(diff.mean())})
        if verbose:
            print(f"r={r:.12g}  max route difference {diff.max():.6e}")
    _write_long_csv(os.path.join(outdir, "routes.csv"), rows)
    _write_json(os.path.join(outdir, "summary.json"), summary)
    _write_manifest(outdir, "dirichlet", pf, seed, ("routes.csv", "summary.json"))
    if plot:
        from . import plots
        r = pf.verify.radii[0]
        plots.plot_route_difference(grid.theta, u_direct.circle_values(r, grid),
                                    u_gehring.circle_values(r, grid),
                                    os.path.join(outdir, "routes.png"))
    return EXIT_OK


def cmd_nullspace(pf: ProblemFile, outdir: str, plot: bool, seed: int, verbose: bool) -> int:
    if pf.nullspace is None:
        raise ProblemFileError("the nullspace command needs a nullspace section")
    if pf.domain["kind"] != "disk":
        raise ProblemFileError("the nullspace command runs on the disk domain")
    problem = build_disk_problem(pf)
    anchors = pf.nullspace["anchors"]
    family = null_generators(len(anchors), anchors, degree=pf.n // 2 - 1)
    base = solve(problem, pf.route, pf.growth_bound)

    # Gram matrix of the generators sampled on |z| = 1/2
    gram_cfg = {"sample_points": 256, "sample_radius": 0.5,
                "rank_threshold": 1e-6, "generator_degree": pf.n // 2 - 1}
    sample = gram_cfg["sample_radius"] * np.exp(
        1j * CircleGrid(gram_cfg["sample_points"]).theta)
    M = np.array([family.exact_value(k, sample) for k in range(len(anchors))])
    gram = (M @ M.conj().T) / sample.size
    sv = np.linalg.svd(gram, compute_uv=False)
    rank = int(np.sum(sv > gram_cfg["rank_threshold"]))

    rows = []
    for i in range(gram.shape[0]):
        rows.extend((f"gram_row{i}", j, gram[i, j].real) for j in range(gram.shape[1]))
    rows.extend(("singular_value", i, s) for i, s in enumerate(sv))
    _write_long_csv(os.path.join(outdir, "gram.csv"), rows)

    exclusions = sorted(set(problem.declared_jumps) | set(anchors))
    fam_problem = RHProblem(lam=problem.lam, phi=problem.phi,
                            declared_jumps=tuple(exclusions))
    res_rows = []
    summary = {"min_singular_value": float(sv.min()), "rank": rank, "sets": []}
    for idx, coeffs in enumerate(pf.nullspace.get("coeff_sets", [])):
        if any(c != 0.0 for c in coeffs):
            evaluator = family_evaluator(base.A, base.B, family, coeffs)
            report = boundary_residual(evaluator, fam_problem, pf.verify.radii,
                                       pf.verify.exclusion_radius)
        else:
            report = boundary_residual(base, fam_problem, pf.verify.radii,
                                       pf.verify.exclusion_radius)
        res_rows.extend((f"set{idx}:{series}", x, y) for series, x, y in report.rows())
        summary["sets"].append({"coeffs": list(coeffs), **report.to_dict()})
        if verbose:
            print(f"set {idx}: L1 at deepest r = {report.l1[-1]:.6e}")
    _write_long_csv(os.path.join(outdir, "residuals.csv"), res_rows)
    _write_json(os.path.join(outdir, "summary.json"), summary)
    _write_manifest(outdir, "nullspace", pf, seed,
                    ("gram.csv", "residuals.csv", "summary.json"),
                    {"gram": gram_cfg})
    if plot:
        from . import plots
        plots.plot_singular_values(sv, os.path.join(outdir, "gram.png"))
    return EXIT_OK


def cmd_hmeasure(pf: ProblemFile, outdir: str, plot: bool, seed: int, verbose: bool) -> int:
    if pf.hmeasure is None:
        raise ProblemFileError("the hmeasure command needs an hmeasure section")
    grid = CircleGrid(pf.n)
    cmap, _boundary = build_map(pf, grid)
    if cmap is None:
        raise ProblemFileError("harmonic measure needs a conformal domain (not a polyline)")
    if pf.domain["kind"] == "disk":
        cmap = None
    arcs = [tuple(a) for a in pf.hmeasure["arcs"]]
    z0 = complex(pf.hmeasure["z0"][0], pf.hmeasure["z0"][1])

    nodes_per_arc = 32768
    per_arc_geom = [harmonic_measure([arc], z0, cmap) for arc in arcs]
    per_arc_quad = [harmonic_measure_quadrature([arc], z0, cmap, nodes_per_arc)
                    for arc in arcs]
    total_geom = harmonic_measure(arcs, z0, cmap)
    total_quad = harmonic_measure_quadrature(arcs, z0, cmap, nodes_per_arc)

    result = {
        "arcs": [list(a) for a in arcs],
        "z0": [z0.real, z0.imag],
        "per_arc_geometric": per_arc_geom,
        "per_arc_quadrature": per_arc_quad,
        "total_geometric": total_geom,
        "total_quadrature": total_quad,
        "difference": abs(total_geom - total_quad),
    }
    _write_json(os.path.join(outdir, "measure.json"), result)
    rows = [("geometric", i, v) for i, v in enumerate(per_arc_geom)]
    rows += [("quadrature", i, v) for i, v in enumerate(per_arc_quad)]
    _write_long_csv(os.path.join(outdir, "measure.csv"), rows)
    _write_manifest(outdir, "hmeasure", pf, seed, ("measure.json", "measure.csv"),
                    {"quadrature_nodes_per_arc": nodes_per_arc})
    if plot:
        from . import plots
        plots.plot_measure_comparison(arcs, per_arc_geom, per_arc_quad,
                                      os.path.join(outdir, "measure.png"))
    if verbose:
        print(f"harmonic measure {total_geom:.12f} (oracle {total_quad:.12f})")
    return EXIT_OK


def cmd_map(pf: ProblemFile, outdir: str, plot: bool, seed: int, verbose: bool) -> int:
    grid = CircleGrid(pf.n)
    cmap, boundary = build_map(pf, grid)
    info: dict = {"domain": pf.domain, "n": pf.n}
    rows = []
    probe_cfg = {"count": 64, "min_radius": 0.1, "max_radius": 0.8}
    if cmap is not None:
        rows.extend(("correspondence", t, p)
                    for t, p in zip(cmap.theta_grid, cmap.boundary_param))
        rng = np.random.default_rng(seed)
        radii = probe_cfg["min_radius"] + (
            probe_cfg["max_radius"] - probe_cfg["min_radius"]) * rng.random(probe_cfg["count"])
        pts = radii * np.exp(2j * np.pi * rng.random(probe_cfg["count"]))
        domain_pts = cmap.from_disk(pts)
        info["roundtrip_max_error"] = float(
            np.abs(cmap.to_disk(domain_pts) - pts).max())
        info["kind"] = cmap.kind
        info["param_kind"] = cmap.param_kind
        info["param_period"] = cmap.param_period
    if boundary is not None:
        info["total_length"] = boundary.total_length
        rows.extend(("arclength", i, s) for i, s in enumerate(boundary.s))
    _write_long_csv(os.path.join(outdir, "correspondence.csv"), rows)
    _write_json(os.path.join(outdir, "map.json"), info)
    _write_manifest(outdir, "map", pf, seed, ("correspondence.csv", "map.json"),
                    {"roundtrip_probe": probe_cfg})
    if plot and cmap is not None:
        from . import plots
        plots.plot_correspondence(cmap.theta_grid, cmap.boundary_param,
                                  os.path.join(outdir, "correspondence.png"))
    if verbose and "roundtrip_max_error" in info:
        print(f"roundtrip max error {info['roundtrip_max_error']:.3e}")
    return EXIT_OK


_COMMANDS = {
    "solve": cmd_solve,
    "dirichlet": cmd_dirichlet,
    "nullspace": cmd_nullspace,
    "hmeasure": cmd_hmeasure,
    "map": cmd_map,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rhdisk",
        description="Boundary-value solver for Re(conj(lambda) f) = phi on the disk "
                    "and Jordan domains, with nontangential boundary verification.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("solve", "run the full solver pipeline and report residuals"),
            ("dirichlet", "solve the Dirichlet problem by both routes"),
            ("nullspace", "build kernel generators and family solutions"),
            ("hmeasure", "compute harmonic measure with an oracle cross-check"),
            ("map", "construct a conformal map and dump its correspondence")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", "-i", required=True,
                       help="problem file path or builtin name (builtin:NAME also works)")
        p.add_argument("--out", "-o", default=None,
                       help="output directory (falls back to the problem "
                            "document's output_dir)")
        p.add_argument("--n", type=int, default=None, help="override grid size")
        p.add_argument("--route", choices=("direct", "lusin"), default=None,
                       help="override solver route")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for randomized test-point sampling")
        p.add_argument("--plot", action="store_true",
                       help="also render figures next to the CSV output")
        p.add_argument("--verbose", "-v", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        pf = load(args.input).with_overrides(n=args.n, route=args.route)
        outdir = args.out if args.out is not None else pf.output_dir
        if outdir is None:
            raise ProblemFileError(
                "no output directory: pass --out or set output_dir in the document")
        os.makedirs(outdir, exist_ok=True)
        return _COMMANDS[args.command](pf, outdir, args.plot, args.seed, args.verbose)
    except ProblemFileError as exc:
        print(f"problem file error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except SolverOverflowError as exc:
        print(f"solver overflow: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except MapConvergenceError as exc:
        print(f"map construction failed: {exc}", file=sys.stderr)
        return EXIT_MAP
    except ThresholdError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_THRESHOLD


if __name__ == "__main__":
    sys.exit(main())
