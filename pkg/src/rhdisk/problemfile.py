"""Problem ingestion: a small JSON document format, schema validation, and
the builtin named examples used by the acceptance suite.

A problem file looks like

    {
      "schema_version": 1,
      "n": 4096,
      "lambda": "exp(1j*cos(theta))",
      "phi": "cos(theta) + 0.5*sin(2*theta)",
      "declared_jumps": [],
      "domain": {"kind": "disk"},
      "route": "direct",
      "verify": {"radii": [0.9, 0.99], "exclusion_radius": 0.1}
    }

Data values are real numbers, [re, im] pairs, expression strings in the
boundary variable (named theta; t, s and tau are accepted aliases), or
piecewise arc lists.  Unknown keys are rejected everywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .boundary import PiecewiseSpec, UnimodularTrace
from .core import RHProblem
from .jordan import (boundary_from_radius, identity_map, natural_parameter,
                     polynomial_map, theodorsen_map)
from .spectral import BoundaryTrace, CircleGrid
from .verify import (DEFAULT_APERTURES, DEFAULT_GAPS, DEFAULT_OFFSETS,
                     DEFAULT_AGREEMENT_TOL)

SCHEMA_VERSION = 1
TWO_PI = 2.0 * np.pi

DEFAULT_RADII = (0.9, 0.99, 0.999, 1.0 - 2.0 ** -12)
DEFAULT_EXCLUSION = 0.1
DEFAULT_GROWTH_BOUND = 50.0


class ProblemFileError(ValueError):
    """The problem document violates the schema."""


_EXPR_NAMES = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp,
    "log": np.log, "sqrt": np.sqrt, "abs": np.abs, "sign": np.sign,
    "pi": np.pi, "e": np.e,
}


def eval_expression(expr: str, var: np.ndarray) -> np.ndarray:
    """Evaluate a boundary-data expression on an array of parameter values."""
    env = dict(_EXPR_NAMES)
    for name in ("theta", "t", "s", "tau"):
        env[name] = var
    try:
        out = eval(expr, {"__builtins__": {}}, env)  # noqa: S307 - restricted env
    except Exception as exc:
        raise ProblemFileError(f"cannot evaluate expression {expr!r}: {exc}") from exc
    return np.broadcast_to(np.asarray(out), var.shape).copy()


def _check_keys(obj: dict, allowed: set, where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ProblemFileError(f"unknown keys in {where}: {sorted(unknown)}")


def _as_value_fn(spec: Any, where: str) -> Callable[[np.ndarray], np.ndarray]:
    """Turn a constant / pair / expression spec into a callable of the parameter."""
    if isinstance(spec, bool):
        raise ProblemFileError(f"{where}: booleans are not data values")
    if isinstance(spec, (int, float)):
        return lambda var, v=float(spec): np.full(var.shape, v)
    if isinstance(spec, list) and len(spec) == 2 and all(isinstance(x, (int, float)) for x in spec):
        z = complex(spec[0], spec[1])
        return lambda var, v=z: np.full(var.shape, v)
    if isinstance(spec, str):
        return lambda var, e=spec: eval_expression(e, var)
    raise ProblemFileError(f"{where}: expected number, [re, im] pair or expression string")


def _parse_piecewise(spec: dict, where: str) -> PiecewiseSpec:
    _check_keys(spec, {"kind", "arcs"}, where)
    arcs = spec.get("arcs")
    if not isinstance(arcs, list) or not arcs:
        raise ProblemFileError(f"{where}: piecewise spec needs a nonempty arcs list")
    pieces = []
    for i, arc in enumerate(arcs):
        if not isinstance(arc, dict):
            raise ProblemFileError(f"{where}: arc {i} must be an object")
        _check_keys(arc, {"start", "end", "value"}, f"{where} arc {i}")
        try:
            start, end = float(arc["start"]), float(arc["end"])
        except (KeyError, TypeError) as exc:
            raise ProblemFileError(f"{where}: arc {i} needs numeric start/end") from exc
        value = arc.get("value")
        fn = _as_value_fn(value, f"{where} arc {i} value")
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            pieces.append((start, end, float(value)))
        elif isinstance(value, list):
            pieces.append((start, end, complex(value[0], value[1])))
        else:
            pieces.append((start, end, fn))
    try:
        return PiecewiseSpec(tuple(pieces))
    except ValueError as exc:
        raise ProblemFileError(f"{where}: {exc}") from exc


@dataclass(frozen=True)
class VerifyConfig:
    radii: tuple = DEFAULT_RADII
    apertures: tuple = DEFAULT_APERTURES
    offsets: tuple = DEFAULT_OFFSETS
    gaps: tuple = DEFAULT_GAPS
    exclusion_radius: float = DEFAULT_EXCLUSION
    agreement_tol: float = DEFAULT_AGREEMENT_TOL
    thresholds: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "radii": list(self.radii),
            "apertures": list(self.apertures),
            "offsets": list(self.offsets),
            "gaps": list(self.gaps),
            "exclusion_radius": self.exclusion_radius,
            "agreement_tol": self.agreement_tol,
            "thresholds": dict(self.thresholds),
        }


@dataclass(frozen=True)
class ProblemFile:
    name: str
    n: int
    lam_spec: Any
    phi_spec: Any
    declared_jumps: tuple
    domain: dict
    route: str
    verify: VerifyConfig
    nullspace: dict | None
    hmeasure: dict | None
    growth_bound: float
    output_dir: str | None = None

    def with_overrides(self, n: int | None = None, route: str | None = None) -> "ProblemFile":
        if n is None and route is None:
            return self
        return ProblemFile(
            name=self.name, n=int(n) if n is not None else self.n,
            lam_spec=self.lam_spec, phi_spec=self.phi_spec,
            declared_jumps=self.declared_jumps, domain=self.domain,
            route=route if route is not None else self.route,
            verify=self.verify, nullspace=self.nullspace,
            hmeasure=self.hmeasure, growth_bound=self.growth_bound,
            output_dir=self.output_dir)

    def describe(self) -> dict:
        """Normalized document for run manifests; JSON-serializable."""
        return {
            "name": self.name,
            "n": self.n,
            "lambda": self.lam_spec,
            "phi": self.phi_spec,
            "declared_jumps": list(self.declared_jumps),
            "domain": self.domain,
            "route": self.route,
            "verify": self.verify.to_dict(),
            "nullspace": self.nullspace,
            "hmeasure": self.hmeasure,
            "growth_bound": self.growth_bound,
            "output_dir": self.output_dir,
        }


_TOP_KEYS = {"schema_version", "name", "n", "lambda", "phi", "declared_jumps",
             "domain", "route", "verify", "nullspace", "hmeasure", "limits",
             "output_dir"}
_VERIFY_KEYS = {"radii", "apertures", "offsets", "gaps", "exclusion_radius",
                "agreement_tol", "thresholds"}
_THRESHOLD_KEYS = {"l1_deepest", "linf_deepest"}
_DOMAIN_KINDS = {"disk", "polynomial", "theodorsen", "polyline"}
_ROUTES = {"direct", "lusin"}


def parse(obj: dict, name: str = "<inline>") -> ProblemFile:
    if not isinstance(obj, dict):
        raise ProblemFileError("problem document must be a JSON object")
    _check_keys(obj, _TOP_KEYS, "problem document")
    if obj.get("schema_version") != SCHEMA_VERSION:
        raise ProblemFileError(f"schema_version must be {SCHEMA_VERSION}")

    n = obj.get("n")
    if not isinstance(n, int) or n < 8 or n & (n - 1) != 0:
        raise ProblemFileError(f"n must be a power of two >= 8, got {n!r}")

    jumps = obj.get("declared_jumps", [])
    if not isinstance(jumps, list) or not all(isinstance(j, (int, float)) for j in jumps):
        raise ProblemFileError("declared_jumps must be a list of angles")
    jumps = tuple(sorted(float(j) for j in jumps))
    if any(not 0.0 <= j < TWO_PI for j in jumps):
        raise ProblemFileError("declared_jumps must lie in [0, 2pi)")

    domain = obj.get("domain", {"kind": "disk"})
    if not isinstance(domain, dict) or domain.get("kind") not in _DOMAIN_KINDS:
        raise ProblemFileError(f"domain.kind must be one of {sorted(_DOMAIN_KINDS)}")
    kind = domain["kind"]
    if kind == "disk":
        _check_keys(domain, {"kind"}, "domain")
    elif kind == "polynomial":
        _check_keys(domain, {"kind", "c"}, "domain")
        c = domain.get("c")
        if not (isinstance(c, list) and len(c) == 2
                and all(isinstance(x, (int, float)) for x in c)):
            raise ProblemFileError("polynomial domain needs c as an [re, im] pair")
        if abs(complex(c[0], c[1])) >= 0.5:
            raise ProblemFileError("polynomial domain requires |c| < 1/2")
    elif kind == "theodorsen":
        _check_keys(domain, {"kind", "rho", "max_iter", "tol"}, "domain")
        rho = domain.get("rho")
        if not isinstance(rho, (str, list)):
            raise ProblemFileError("theodorsen domain needs rho as an expression or sample list")
    else:  # polyline
        _check_keys(domain, {"kind", "points"}, "domain")
        pts = domain.get("points")
        if not (isinstance(pts, list) and len(pts) >= 3
                and all(isinstance(p, list) and len(p) == 2 for p in pts)):
            raise ProblemFileError("polyline domain needs a list of [x, y] points")

    route = obj.get("route", "direct")
    if route not in _ROUTES:
        raise ProblemFileError(f"route must be one of {sorted(_ROUTES)}")

    vconf = obj.get("verify", {})
    if not isinstance(vconf, dict):
        raise ProblemFileError("verify must be an object")
    _check_keys(vconf, _VERIFY_KEYS, "verify")
    thresholds = vconf.get("thresholds", {})
    if not isinstance(thresholds, dict):
        raise ProblemFileError("verify.thresholds must be an object")
    _check_keys(thresholds, _THRESHOLD_KEYS, "verify.thresholds")

    def _floats(key, default):
        val = vconf.get(key)
        if val is None:
            return tuple(default)
        if not isinstance(val, list) or not val:
            raise ProblemFileError(f"verify.{key} must be a nonempty list")
        return tuple(float(x) for x in val)

    verify = VerifyConfig(
        radii=_floats("radii", DEFAULT_RADII),
        apertures=_floats("apertures", DEFAULT_APERTURES),
        offsets=_floats("offsets", DEFAULT_OFFSETS),
        gaps=_floats("gaps", DEFAULT_GAPS),
        exclusion_radius=float(vconf.get("exclusion_radius", DEFAULT_EXCLUSION)),
        agreement_tol=float(vconf.get("agreement_tol", DEFAULT_AGREEMENT_TOL)),
        thresholds={k: float(v) for k, v in thresholds.items()},
    )

    nullspace = obj.get("nullspace")
    if nullspace is not None:
        if not isinstance(nullspace, dict):
            raise ProblemFileError("nullspace must be an object")
        _check_keys(nullspace, {"anchors", "coeff_sets"}, "nullspace")
        anchors = nullspace.get("anchors")
        if not (isinstance(anchors, list) and len(anchors) >= 1):
            raise ProblemFileError("nullspace.anchors must be a nonempty list of angles")
        sets = nullspace.get("coeff_sets", [])
        if not isinstance(sets, list) or not all(
                isinstance(cs, list) and len(cs) == len(anchors) for cs in sets):
            raise ProblemFileError("each nullspace.coeff_sets entry must match the anchor count")
        nullspace = {"anchors": [float(a) for a in anchors],
                     "coeff_sets": [[float(c) for c in cs] for cs in sets]}

    hmeasure = obj.get("hmeasure")
    if hmeasure is not None:
        if not isinstance(hmeasure, dict):
            raise ProblemFileError("hmeasure must be an object")
        _check_keys(hmeasure, {"arcs", "z0"}, "hmeasure")
        arcs = hmeasure.get("arcs")
        z0 = hmeasure.get("z0")
        if not (isinstance(arcs, list) and arcs and all(
                isinstance(a, list) and len(a) == 2 for a in arcs)):
            raise ProblemFileError("hmeasure.arcs must be a list of [start, end] pairs")
        for a, b in arcs:
            if float(b) <= float(a):
                raise ProblemFileError(f"hmeasure arc [{a}, {b}] has nonpositive length")
            # disk arcs are angles: start in one period, end may pass it
            # for wrap-around; mapped domains use their own parameter scale
            if kind == "disk" and not (0.0 <= float(a) < TWO_PI
                                       and float(b) - float(a) <= TWO_PI):
                raise ProblemFileError(
                    f"hmeasure arc [{a}, {b}] must start in [0, 2pi) with "
                    "length at most one period")
        if not (isinstance(z0, list) and len(z0) == 2):
            raise ProblemFileError("hmeasure.z0 must be an [x, y] pair")
        hmeasure = {"arcs": [[float(a), float(b)] for a, b in arcs],
                    "z0": [float(z0[0]), float(z0[1])]}

    limits = obj.get("limits", {})
    if not isinstance(limits, dict):
        raise ProblemFileError("limits must be an object")
    _check_keys(limits, {"growth_bound"}, "limits")
    growth_bound = float(limits.get("growth_bound", DEFAULT_GROWTH_BOUND))

    output_dir = obj.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ProblemFileError("output_dir must be a string path")

    lam_spec = obj.get("lambda")
    phi_spec = obj.get("phi")
    probe = np.linspace(0.0, TWO_PI, 8, endpoint=False)
    for spec, label in ((lam_spec, "lambda"), (phi_spec, "phi")):
        if spec is None:
            continue
        if isinstance(spec, dict):
            if spec.get("kind") != "piecewise":
                raise ProblemFileError(f"{label}: object specs must have kind piecewise")
            if kind != "disk":
                raise ProblemFileError(f"{label}: piecewise data requires the disk domain")
            _parse_piecewise(spec, label).sample(CircleGrid(8))
        else:
            _as_value_fn(spec, label)(probe)  # catch bad expressions at parse time

    return ProblemFile(name=str(obj.get("name", name)), n=n, lam_spec=lam_spec,
                       phi_spec=phi_spec, declared_jumps=jumps, domain=domain,
                       route=route, verify=verify, nullspace=nullspace,
                       hmeasure=hmeasure, growth_bound=growth_bound,
                       output_dir=output_dir)


def _sample_spec(spec: Any, grid: CircleGrid, label: str) -> np.ndarray:
    if isinstance(spec, dict):
        return _parse_piecewise(spec, label).sample(grid)
    return _as_value_fn(spec, label)(grid.theta)


def build_phi_trace(pf: ProblemFile, grid: CircleGrid) -> BoundaryTrace:
    if pf.phi_spec is None:
        raise ProblemFileError("this command needs phi data")
    phi_vals = _sample_spec(pf.phi_spec, grid, "phi")
    if np.iscomplexobj(phi_vals):
        if np.any(phi_vals.imag != 0.0):
            raise ProblemFileError("phi must be real-valued")
        phi_vals = phi_vals.real
    return BoundaryTrace(grid, phi_vals)


def build_disk_problem(pf: ProblemFile) -> RHProblem:
    if pf.lam_spec is None or pf.phi_spec is None:
        raise ProblemFileError("this command needs both lambda and phi data")
    grid = CircleGrid(pf.n)
    lam_vals = np.asarray(_sample_spec(pf.lam_spec, grid, "lambda"), dtype=np.complex128)
    try:
        lam = UnimodularTrace.from_values(grid, lam_vals)
    except ValueError as exc:
        raise ProblemFileError(f"lambda data: {exc}") from exc
    return RHProblem(lam=lam, phi=build_phi_trace(pf, grid),
                     declared_jumps=pf.declared_jumps)


def build_map(pf: ProblemFile, grid: CircleGrid):
    """Construct (map, boundary) for the problem's domain.

    The disk gets the identity map; polyline domains carry no map (only an
    arc-length table) and cannot be solved on.
    """
    kind = pf.domain["kind"]
    if kind == "disk":
        return identity_map(grid), None
    if kind == "polynomial":
        c = complex(pf.domain["c"][0], pf.domain["c"][1])
        cmap = polynomial_map(c, grid)
        th = np.linspace(0.0, TWO_PI, 4 * grid.n, endpoint=False)
        pts = np.exp(1j * th) + c * np.exp(2j * th)
        boundary = natural_parameter(pts, check_simple=False)
        return cmap, boundary
    if kind == "theodorsen":
        rho_spec = pf.domain["rho"]
        if isinstance(rho_spec, str):
            rho = lambda t: eval_expression(rho_spec, np.asarray(t, dtype=float)).real
        else:
            rho = np.asarray(rho_spec, dtype=float)
        kwargs = {}
        if "max_iter" in pf.domain:
            kwargs["max_iter"] = int(pf.domain["max_iter"])
        if "tol" in pf.domain:
            kwargs["tol"] = float(pf.domain["tol"])
        cmap = theodorsen_map(rho, grid, **kwargs)
        rho_fn = rho if callable(rho) else (
            lambda t, arr=rho: np.interp(np.mod(t, TWO_PI),
                                         np.linspace(0.0, TWO_PI, arr.size + 1),
                                         np.append(arr, arr[0])))
        boundary = boundary_from_radius(rho_fn, max(4096, grid.n))
        return cmap, boundary
    if kind == "polyline":
        pts = np.asarray([complex(p[0], p[1]) for p in pf.domain["points"]])
        return None, natural_parameter(pts)
    raise ProblemFileError(f"unsupported domain kind {kind!r}")


BUILTINS: dict[str, dict] = {
    "constant": {
        "schema_version": 1, "name": "constant", "n": 1024,
        "lambda": 1.0, "phi": 1.0,
        "domain": {"kind": "disk"},
    },
    "rotate-i": {
        "schema_version": 1, "name": "rotate-i", "n": 4096,
        "lambda": [0.0, 1.0], "phi": "cos(theta)",
        "domain": {"kind": "disk"},
        "verify": {"radii": [0.9, 0.99, 0.999, 0.999755859375]},
    },
    "two-jump": {
        "schema_version": 1, "name": "two-jump", "n": 8192,
        "lambda": {"kind": "piecewise", "arcs": [
            {"start": 0.0, "end": 3.141592653589793, "value": 1.0},
            {"start": 3.141592653589793, "end": 6.283185307179586, "value": [0.0, 1.0]},
        ]},
        "phi": 1.0,
        "declared_jumps": [0.0, 3.141592653589793],
        "domain": {"kind": "disk"},
        "verify": {"radii": [0.9, 0.99, 0.999], "exclusion_radius": 0.1},
    },
    "smooth": {
        "schema_version": 1, "name": "smooth", "n": 4096,
        "lambda": "exp(1j*cos(theta))",
        "phi": "cos(theta) + 0.5*sin(2*theta)",
        "domain": {"kind": "disk"},
    },
    "square": {
        "schema_version": 1, "name": "square", "n": 4096,
        "lambda": 1.0,
        "phi": {"kind": "piecewise", "arcs": [
            {"start": 0.0, "end": 3.141592653589793, "value": 1.0},
            {"start": 3.141592653589793, "end": 6.283185307179586, "value": -1.0},
        ]},
        "declared_jumps": [0.0, 3.141592653589793],
        "domain": {"kind": "disk"},
    },
    "nullspace-8": {
        "schema_version": 1, "name": "nullspace-8", "n": 4096,
        "lambda": "exp(1j*cos(theta))",
        "phi": "cos(theta) + 0.5*sin(2*theta)",
        "domain": {"kind": "disk"},
        "nullspace": {
            "anchors": [0.0, 0.7853981633974483, 1.5707963267948966,
                        2.356194490192345, 3.141592653589793,
                        3.926990816987241, 4.71238898038469, 5.497787143782138],
            "coeff_sets": [
                [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
                [0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05],
            ],
        },
    },
    "hmeasure-demo": {
        "schema_version": 1, "name": "hmeasure-demo", "n": 1024,
        "domain": {"kind": "disk"},
        "hmeasure": {"arcs": [[0.0, 0.7853981633974483],
                              [1.5707963267948966, 3.141592653589793]],
                     "z0": [0.5, 0.0]},
    },
    "star-map": {
        "schema_version": 1, "name": "star-map", "n": 1024,
        "domain": {"kind": "theodorsen", "rho": "1 + 0.2*cos(t)"},
    },
}


def load(source: str) -> ProblemFile:
    """Load a problem from a file path or a builtin name.

    Builtin names may be given bare or with a ``builtin:`` prefix; a path to
    an existing file always wins over a builtin of the same name.
    """
    import os

    if source.startswith("builtin:"):
        name = source[len("builtin:"):]
        if name not in BUILTINS:
            raise ProblemFileError(
                f"unknown builtin {name!r}; available: {sorted(BUILTINS)}")
        return parse(BUILTINS[name], name)
    if os.path.exists(source):
        with open(source) as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ProblemFileError(f"invalid JSON in {source}: {exc}") from exc
        return parse(obj, os.path.basename(source))
    if source in BUILTINS:
        return parse(BUILTINS[source], source)
    raise ProblemFileError(f"no such problem file or builtin: {source!r}")
