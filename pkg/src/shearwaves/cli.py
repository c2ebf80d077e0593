"""Command-line entry point: JSON config in, CSV/JSON artifacts out.

Subcommands: simulate, exact, classify, hodograph, verify, convergence.
Every run validates its config against a closed schema (unknown keys are
rejected), computes, and writes a deterministic artifact set into the output
directory: a ``manifest.json`` that echoes the config and records
diagnostics, plus ``snapshots.csv`` / ``samples.csv`` / ``report.json``
depending on the command.

Exit codes: 0 success, 1 verification failure, 2 config error,
3 runtime/solver error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .constitutive import flux_from_config, modulus_from_config
from .errors import ConfigError, NeitherOrientationDecays, ShearWaveError
from .exact import (
    CarrollWave,
    HodographData,
    carroll_full_state,
    eval_asymptotic_linear,
    eval_overdetermined,
    eval_separable,
    generalized_carroll_full_state,
    sample_hodograph,
    sample_simple_wave,
    strain_to_polar,
)
from .analysis import classify, temple_eigen
from .profiles import profile_from_config
from .simulate import Grid1D, SimulationConfig, evolve_asymptotic, evolve_full, evolve_scalar
from .verify import (
    AngleSquaredControl,
    ConservationSpec,
    FieldSample,
    PerturbedRadialControl,
    SymmetrySpec,
    commutator_residual,
    conservation_residual,
    convergence_study,
    linearized_symmetry_residual,
    residual_asymptotic,
    residual_full,
)

COMMANDS = ("simulate", "exact", "classify", "hodograph", "verify", "convergence")

# ---------------------------------------------------------------------------
# schema building blocks

NUM = {"type": "number"}
POS_NUM = {"type": "number", "exclusiveMinimum": 0}
SIGN = {"type": "integer", "enum": [-1, 1]}
NUM_LIST = {"type": "array", "items": NUM, "minItems": 1}
AXIS = {
    "type": "object",
    "properties": {"min": NUM, "max": NUM, "n": {"type": "integer", "minimum": 2}},
    "required": ["min", "max", "n"],
    "additionalProperties": False,
}
SPAN = {
    "type": "object",
    "properties": {"min": NUM, "max": NUM},
    "required": ["min", "max"],
    "additionalProperties": False,
}


def _kind(kind, props, required=()):
    return {
        "type": "object",
        "properties": {"kind": {"const": kind}, **props},
        "required": ["kind", *required],
        "additionalProperties": False,
    }


PROFILE = {
    "oneOf": [
        _kind("linear", {"k": NUM}, ["k"]),
        _kind("sine", {"amp": NUM, "freq": NUM, "offset": NUM}, ["amp", "freq"]),
        _kind("poly", {"coeffs": NUM_LIST}, ["coeffs"]),
        _kind("const", {"c": NUM}, ["c"]),
    ]
}
MODULUS = {
    "oneOf": [
        _kind("mooney_rivlin", {"mu": POS_NUM, "rho": POS_NUM}, ["mu"]),
        _kind("cubic", {"mu0": NUM, "mu1": NUM, "rho": POS_NUM}, ["mu0", "mu1"]),
        _kind("power", {"mu": POS_NUM, "n": NUM, "rho": POS_NUM}, ["mu", "n"]),
        _kind("poly", {"coeffs": NUM_LIST, "rho": POS_NUM}, ["coeffs"]),
    ]
}
FLUX = {
    "oneOf": [
        _kind("product", {}),
        _kind("ratio", {}),
        _kind("poly", {"coeffs": {"type": "array", "items": NUM_LIST, "minItems": 1}}, ["coeffs"]),
        _kind("sum_squares", {"scale": NUM}),
        _kind("modulus", {"modulus": MODULUS}, ["modulus"]),
    ]
}
GRID = {
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 8},
        "a": NUM,
        "b": NUM,
        "boundary": {"enum": ["periodic", "outflow"]},
    },
    "required": ["n", "a", "b"],
    "additionalProperties": False,
}
RUN = {
    "type": "object",
    "properties": {
        "end": {"type": "number", "minimum": 0},
        "scheme": {"enum": ["lax_friedrichs", "muscl_minmod"]},
        "cfl": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.9},
        "snapshot_stride": {"type": "integer", "minimum": 0},
        "blowup_factor": {"type": "number", "exclusiveMinimum": 1},
    },
    "required": ["end"],
    "additionalProperties": False,
}
COMMAND_PROP = {"enum": list(COMMANDS)}

SIMULATE_SCHEMA = {
    "type": "object",
    "properties": {
        "command": COMMAND_PROP,
        "system": {"enum": ["full", "asymptotic", "scalar"]},
        "modulus": MODULUS,
        "beta": NUM,
        "grid": GRID,
        "run": RUN,
        "init": {"type": "object"},
        "oracle_check": {"type": "boolean"},
    },
    "required": ["system", "grid", "run", "init"],
    "additionalProperties": False,
}
INIT_SCHEMAS = {
    "full": {
        "oneOf": [
            _kind("carroll", {"amplitude": POS_NUM, "wavenumber": POS_NUM,
                              "polarization": SIGN}, ["amplitude", "wavenumber"]),
            _kind("zero", {}),
        ]
    },
    "asymptotic": {
        "oneOf": [
            _kind("constant_amplitude", {"amplitude": POS_NUM, "profile": PROFILE},
                  ["amplitude", "profile"]),
            _kind("plane", {"profile": PROFILE}, ["profile"]),
        ]
    },
    "scalar": {
        "oneOf": [_kind("profile", {"profile": PROFILE}, ["profile"])]
    },
}

EXACT_SCHEMA = {
    "type": "object",
    "properties": {
        "command": COMMAND_PROP,
        "solution": {
            "oneOf": [
                _kind("carroll", {"modulus": MODULUS, "amplitude": POS_NUM,
                                  "wavenumber": POS_NUM, "polarization": SIGN,
                                  "x": AXIS, "t": AXIS},
                      ["modulus", "amplitude", "wavenumber", "x", "t"]),
                _kind("generalized", {"modulus": MODULUS, "amplitude": POS_NUM,
                                      "profile": PROFILE, "direction": SIGN,
                                      "polarization": SIGN, "x": AXIS, "t": AXIS},
                      ["modulus", "amplitude", "profile", "x", "t"]),
                _kind("constant_amplitude", {"beta": NUM, "amplitude": POS_NUM,
                                             "profile": PROFILE, "X": AXIS, "tau": AXIS},
                      ["beta", "amplitude", "profile", "X", "tau"]),
                _kind("simple_wave", {"beta": NUM, "profile": PROFILE,
                                      "X": AXIS, "tau": AXIS},
                      ["beta", "profile", "X", "tau"]),
                _kind("separable", {"flux": FLUX, "k": NUM, "phi0": NUM, "dphi0": NUM,
                                    "x": AXIS, "t": AXIS},
                      ["flux", "k", "phi0", "dphi0", "x", "t"]),
                _kind("overdetermined", {"flux": FLUX, "level": POS_NUM,
                                         "profile": PROFILE, "direction": SIGN,
                                         "v_bracket": {"type": "array", "items": NUM,
                                                       "minItems": 2, "maxItems": 2},
                                         "x": AXIS, "t": AXIS},
                      ["flux", "level", "profile", "x", "t"]),
            ]
        },
    },
    "required": ["solution"],
    "additionalProperties": False,
}

CLASSIFY_SCHEMA = {
    "type": "object",
    "properties": {
        "command": COMMAND_PROP,
        "flux": FLUX,
        "samples": {
            "type": "object",
            "properties": {"u": AXIS, "v": AXIS},
            "required": ["u", "v"],
            "additionalProperties": False,
        },
        "alpha": FLUX,
    },
    "required": ["flux", "samples"],
    "additionalProperties": False,
}

HODOGRAPH_SCHEMA = {
    "type": "object",
    "properties": {
        "command": COMMAND_PROP,
        "beta": NUM,
        "phase": PROFILE,
        "radial": PROFILE,
        "X": AXIS,
        "tau": AXIS,
        "seed": {"type": "array", "items": NUM, "minItems": 2, "maxItems": 2},
    },
    "required": ["beta", "phase", "radial", "X", "tau", "seed"],
    "additionalProperties": False,
}

VERIFY_SCHEMA = {
    "type": "object",
    "properties": {
        "command": COMMAND_PROP,
        "study": {"enum": ["full", "asymptotic", "conservation",
                           "linearized_symmetry", "commutator"]},
        "beta": NUM,
        "solution": {"type": "object"},
        "rectangle": {
            "type": "object",
            "properties": {"coord": SPAN, "point": SPAN},
            "required": ["coord", "point"],
            "additionalProperties": False,
        },
        "levels": {"type": "array", "items": {"type": "integer", "minimum": 5}, "minItems": 2},
        "order_target": NUM,
        "negative_control": {"type": "boolean"},
        "conservation": {
            "type": "object",
            "properties": {"amp_weight": PROFILE, "angle_weight": PROFILE},
            "required": ["amp_weight", "angle_weight"],
            "additionalProperties": False,
        },
        "symmetry": {
            "type": "object",
            "properties": {"phase": PROFILE, "radial": PROFILE},
            "required": ["phase", "radial"],
            "additionalProperties": False,
        },
        "jets": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "tol_factor": POS_NUM,
    },
    "required": ["study"],
    "additionalProperties": False,
}
VERIFY_SOLUTION_SCHEMAS = {
    "carroll": _kind("carroll", {"modulus": MODULUS, "amplitude": POS_NUM,
                                 "wavenumber": POS_NUM}, ["modulus", "amplitude", "wavenumber"]),
    "constant_amplitude": _kind("constant_amplitude",
                                {"amplitude": POS_NUM, "profile": PROFILE},
                                ["amplitude", "profile"]),
    "hodograph": _kind("hodograph", {"phase": PROFILE, "radial": PROFILE,
                                     "seed": {"type": "array", "items": NUM,
                                              "minItems": 2, "maxItems": 2}},
                       ["phase", "radial", "seed"]),
}

CONVERGENCE_SCHEMA = {
    "type": "object",
    "properties": {
        "command": COMMAND_PROP,
        "system": {"enum": ["full", "asymptotic", "scalar"]},
        "modulus": MODULUS,
        "beta": NUM,
        "grid": {
            "type": "object",
            "properties": {"a": NUM, "b": NUM, "boundary": {"enum": ["periodic", "outflow"]}},
            "required": ["a", "b"],
            "additionalProperties": False,
        },
        "run": RUN,
        "levels": {"type": "array", "items": {"type": "integer", "minimum": 8}, "minItems": 2},
        "oracle": {"type": "object"},
        "order_target": NUM,
        "order_tol": POS_NUM,
    },
    "required": ["system", "grid", "run", "levels", "oracle"],
    "additionalProperties": False,
}
ORACLE_SCHEMAS = {
    "full": _kind("carroll", {"amplitude": POS_NUM, "wavenumber": POS_NUM,
                              "polarization": SIGN}, ["amplitude", "wavenumber"]),
    "asymptotic": _kind("constant_amplitude", {"amplitude": POS_NUM, "profile": PROFILE},
                        ["amplitude", "profile"]),
    "scalar": _kind("simple_wave", {"profile": PROFILE}, ["profile"]),
}

SCHEMAS = {
    "simulate": SIMULATE_SCHEMA,
    "exact": EXACT_SCHEMA,
    "classify": CLASSIFY_SCHEMA,
    "hodograph": HODOGRAPH_SCHEMA,
    "verify": VERIFY_SCHEMA,
    "convergence": CONVERGENCE_SCHEMA,
}


# ---------------------------------------------------------------------------
# plumbing


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            config = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    return config


def _validate(config: dict, schema: dict, where: str = "config"):
    try:
        jsonschema.Draft202012Validator(schema).validate(config)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid {where} at {path}: {exc.message}")


def _axis(cfg: dict) -> np.ndarray:
    if not cfg["max"] > cfg["min"]:
        raise ConfigError("axis needs max > min")
    return np.linspace(cfg["min"], cfg["max"], cfg["n"])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _write_json(path: Path, obj: dict):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_jsonable(obj), f, indent=2, sort_keys=True)
        f.write("\n")


def _write_csv(path: Path, header, columns):
    """Write equal-length 1D columns at full double precision."""
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = [np.ravel(np.asarray(c, dtype=float)) for c in columns]
    n = len(columns[0])
    if any(len(c) != n for c in columns):
        raise ValueError("CSV columns must have equal length")
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for i in range(n):
            writer.writerow([format(c[i], ".17g") for c in columns])


def _manifest(outdir: Path, command: str, config: dict, status: str, threads: int,
              **extra):
    doc = {
        "package": "shearwaves",
        "version": __version__,
        "command": command,
        "config": config,
        "status": status,
        "threads": threads,
        **extra,
    }
    _write_json(outdir / "manifest.json", doc)


def _say(quiet: bool, message: str):
    if not quiet:
        print(message)


# ---------------------------------------------------------------------------
# simulate


def _simulate_init(config, centers):
    system = config["system"]
    init = config["init"]
    _validate(init, INIT_SCHEMAS[system], where="init block")
    if system == "full":
        if "modulus" not in config:
            raise ConfigError("system 'full' requires a 'modulus' block")
        m = modulus_from_config(config["modulus"])
        if init["kind"] == "carroll":
            wave = CarrollWave.from_modulus(m, init["amplitude"], init["wavenumber"],
                                            init.get("polarization", 1))
            state = carroll_full_state(wave, centers, 0.0)
            oracle = lambda x, t: np.stack(carroll_full_state(wave, x, t))
        else:
            z = np.zeros_like(centers)
            state = (z, z, z, z)
            oracle = lambda x, t: np.zeros((4, len(x)))
        return m, None, np.stack(state), oracle
    if "beta" not in config:
        raise ConfigError(f"system {system!r} requires 'beta'")
    beta = float(config["beta"])
    if system == "asymptotic":
        if init["kind"] == "constant_amplitude":
            amp = init["amplitude"]
            prof = profile_from_config(init["profile"])
            U, V = eval_asymptotic_linear(beta, amp, prof, 0.0, centers)
            oracle = lambda tau, X: np.stack(eval_asymptotic_linear(beta, amp, prof, X, tau))
        else:
            prof = profile_from_config(init["profile"])
            U = np.asarray(prof(centers), dtype=float)
            V = np.zeros_like(U)
            oracle = None
        return None, beta, np.stack([np.broadcast_to(U, centers.shape),
                                     np.broadcast_to(V, centers.shape)]), oracle
    prof = profile_from_config(init["profile"])
    rho0 = np.broadcast_to(np.asarray(prof(centers), dtype=float), centers.shape)
    oracle = lambda tau, X: sample_simple_wave(beta, prof, [X], tau)
    return None, beta, rho0[None, :], oracle


def cmd_simulate(config: dict, outdir: Path, threads: int, quiet: bool) -> int:
    _validate(config, SIMULATE_SCHEMA)
    grid_cfg = config["grid"]
    try:
        grid = Grid1D(n=grid_cfg["n"], a=grid_cfg["a"], b=grid_cfg["b"],
                      boundary=grid_cfg.get("boundary", "periodic"))
        run = SimulationConfig(**config["run"])
    except ValueError as exc:
        raise ConfigError(str(exc))
    m, beta, w0, oracle = _simulate_init(config, grid.centers)

    system = config["system"]
    try:
        if system == "full":
            from .exact import FullState
            traj = evolve_full(m, grid, FullState(*w0), run)
        elif system == "asymptotic":
            from .exact import StrainState
            traj = evolve_asymptotic(beta, grid, StrainState(*w0), run)
        else:
            traj = evolve_scalar(beta, grid, w0[0], run)
    except ShearWaveError as exc:
        error = {"type": type(exc).__name__, "message": str(exc)}
        coordinate = getattr(exc, "coordinate", None)
        if coordinate is not None:
            error["coordinate"] = coordinate
        _manifest(outdir, "simulate", config, "error", threads, error=error)
        _say(quiet, f"solver error ({error['type']}); manifest in {outdir}")
        return 3

    names = list(traj.field_names)
    coord_col, center_col = [], []
    field_cols = [[] for _ in names]
    for si, coord in enumerate(traj.coords):
        coord_col.append(np.full(grid.n, coord))
        center_col.append(grid.centers)
        for fi in range(len(names)):
            field_cols[fi].append(traj.states[si, fi])
    columns = [np.concatenate(coord_col), np.concatenate(center_col)]
    columns += [np.concatenate(c) for c in field_cols]
    _write_csv(outdir / "snapshots.csv", ["coordinate", "cell_center", *names], columns)

    diagnostics = {
        "n_steps": int(len(traj.step_coords)),
        "initial_gradient": traj.initial_gradient,
        "blowup_coordinate": traj.blowup_coordinate,
        "snapshot_coords": traj.coords,
        "step_coords": traj.step_coords,
        "max_speed": traj.step_max_speed,
        "max_gradient": traj.step_max_gradient,
        "total_variation": traj.tv,
    }
    extra = {}
    if config.get("oracle_check"):
        if oracle is None:
            raise ConfigError("oracle_check is not available for this init family")
        ref = oracle(grid.centers, float(traj.coords[-1]))
        extra["oracle_error_linf"] = float(np.max(np.abs(traj.final - ref)))
    _manifest(outdir, "simulate", config, "ok", threads,
              grid={**grid_cfg, "h": grid.h}, diagnostics=diagnostics, **extra)
    _say(quiet, f"wrote {outdir / 'snapshots.csv'}")
    return 0


# ---------------------------------------------------------------------------
# exact sampling


def _mesh(coord_axis, point_axis):
    return np.meshgrid(coord_axis, point_axis, indexing="ij")


def _sample_exact(sol: dict):
    kind = sol["kind"]
    if kind == "carroll":
        m = modulus_from_config(sol["modulus"])
        wave = CarrollWave.from_modulus(m, sol["amplitude"], sol["wavenumber"],
                                        sol.get("polarization", 1))
        T, X = _mesh(_axis(sol["t"]), _axis(sol["x"]))
        U, V, M, N = carroll_full_state(wave, X, T)
        return ["t", "x", "U", "V", "M", "N"], [T, X, U, V, M, N]
    if kind == "generalized":
        m = modulus_from_config(sol["modulus"])
        prof = profile_from_config(sol["profile"])
        T, X = _mesh(_axis(sol["t"]), _axis(sol["x"]))
        U, V, M, N = generalized_carroll_full_state(
            m, sol["amplitude"], prof, X, T,
            sol.get("direction", -1), sol.get("polarization", 1))
        return ["t", "x", "U", "V", "M", "N"], [T, X, U, V, M, N]
    if kind == "constant_amplitude":
        prof = profile_from_config(sol["profile"])
        Xc, Tau = _mesh(_axis(sol["X"]), _axis(sol["tau"]))
        U, V = eval_asymptotic_linear(sol["beta"], sol["amplitude"], prof, Xc, Tau)
        rho, theta = strain_to_polar(U, V)
        return ["X", "tau", "U", "V", "rho", "theta"], [Xc, Tau, U, V, rho, theta]
    if kind == "simple_wave":
        prof = profile_from_config(sol["profile"])
        Xg = _axis(sol["X"])
        taug = _axis(sol["tau"])
        rho = sample_simple_wave(sol["beta"], prof, Xg, taug)
        Xc, Tau = _mesh(Xg, taug)
        return ["X", "tau", "rho"], [Xc, Tau, rho]
    if kind == "separable":
        f = flux_from_config(sol["flux"])
        t = _axis(sol["t"])
        x = _axis(sol["x"])
        solution = eval_separable(f, sol["k"], sol["phi0"], sol["dphi0"], t)
        T, X = _mesh(t, x)
        u = solution.u_field(x)
        v = solution.v_field(x)
        phi = np.broadcast_to(solution.phi[:, None], T.shape)
        return ["t", "x", "phi", "u", "v"], [T, X, phi, u, v]
    f = flux_from_config(sol["flux"])
    prof = profile_from_config(sol["profile"])
    T, X = _mesh(_axis(sol["t"]), _axis(sol["x"]))
    bracket = tuple(sol.get("v_bracket", (1e-8, 10.0)))
    U, V = eval_overdetermined(f, sol["level"], prof, X, T,
                               sol.get("direction", 1), bracket)
    return ["t", "x", "U", "V"], [T, X, U, V]


def cmd_exact(config: dict, outdir: Path, threads: int, quiet: bool) -> int:
    _validate(config, EXACT_SCHEMA)
    try:
        header, columns = _sample_exact(config["solution"])
    except ShearWaveError as exc:
        _manifest(outdir, "exact", config, "error", threads,
                  error={"type": type(exc).__name__, "message": str(exc)})
        _say(quiet, f"sampling failed ({type(exc).__name__}); manifest in {outdir}")
        return 3
    _write_csv(outdir / "samples.csv", header, columns)
    _manifest(outdir, "exact", config, "ok", threads,
              rows=int(np.asarray(columns[0]).size), columns=header)
    _say(quiet, f"wrote {outdir / 'samples.csv'}")
    return 0


# ---------------------------------------------------------------------------
# classify


def cmd_classify(config: dict, outdir: Path, threads: int, quiet: bool) -> int:
    _validate(config, CLASSIFY_SCHEMA)
    f = flux_from_config(config["flux"])
    u = _axis(config["samples"]["u"])
    v = _axis(config["samples"]["v"])
    if np.any(u == 0.0) or np.any(v == 0.0):
        raise ConfigError("sample axes must avoid u = 0 and v = 0")
    U, V = np.meshgrid(u, v, indexing="ij")
    pts = np.column_stack([U.ravel(), V.ravel()])

    P = np.asarray(f.p(U, V), dtype=float)
    Pu = np.asarray(f.p_u(U, V), dtype=float)
    Pv = np.asarray(f.p_v(U, V), dtype=float)
    scale = max(1.0, float(np.max(np.abs(P))))
    if float(np.max(np.abs(Pu))) <= 1e-12 * scale and float(np.max(np.abs(Pv))) <= 1e-12 * scale:
        report = {
            "constant_flux": True,
            "flags": {"equal_eigenvalues": True, "completely_exceptional": True,
                      "hamiltonian": True, "decouples": True},
            "residuals": {"equal_eigenvalues": 0.0, "completely_exceptional": 0.0,
                          "hamiltonian": 0.0, "decouples": 0.0},
            "n_samples": int(pts.shape[0]),
            "note": "constant flux: the system is linear and every family is degenerate",
        }
        _write_json(outdir / "report.json", report)
        _manifest(outdir, "classify", config, "ok", threads)
        _say(quiet, f"wrote {outdir / 'report.json'}")
        return 0

    alpha = None
    if "alpha" in config:
        from .analysis import ScalarField2D
        alpha = ScalarField2D.from_flux(flux_from_config(config["alpha"]))
    cls = classify(f, pts, alpha=alpha)
    ld2_worst = 0.0
    lam = []
    for uu, vv in pts:
        eig = temple_eigen(f, uu, vv)
        ld2_worst = max(ld2_worst, abs(eig.grad2_dot_d2))
        lam.append((eig.lambda1, eig.lambda2))
    lam = np.asarray(lam)
    report = {
        "constant_flux": False,
        "flags": {
            "equal_eigenvalues": cls.equal_eigenvalues,
            "completely_exceptional": cls.completely_exceptional,
            "hamiltonian": cls.hamiltonian,
            "decouples": cls.decouples,
        },
        "residuals": cls.residuals,
        "n_samples": cls.n_samples,
        "eigen": {
            "max_abs_grad2_dot_d2": ld2_worst,
            "lambda1_range": [float(lam[:, 0].min()), float(lam[:, 0].max())],
            "lambda2_range": [float(lam[:, 1].min()), float(lam[:, 1].max())],
        },
    }
    _write_json(outdir / "report.json", report)
    _manifest(outdir, "classify", config, "ok", threads)
    _say(quiet, f"wrote {outdir / 'report.json'}")
    return 0


# ---------------------------------------------------------------------------
# hodograph


def cmd_hodograph(config: dict, outdir: Path, threads: int, quiet: bool) -> int:
    _validate(config, HODOGRAPH_SCHEMA)
    data = HodographData(phase_fn=profile_from_config(config["phase"]),
                         radial_fn=profile_from_config(config["radial"]))
    X = _axis(config["X"])
    tau = _axis(config["tau"])
    try:
        rho, theta = sample_hodograph(data, config["beta"], X, tau, tuple(config["seed"]))
    except ShearWaveError as exc:
        _manifest(outdir, "hodograph", config, "error", threads,
                  error={"type": type(exc).__name__, "message": str(exc)})
        _say(quiet, f"inversion failed ({type(exc).__name__}); manifest in {outdir}")
        return 3
    Xc, Tau = _mesh(X, tau)
    _write_csv(outdir / "samples.csv", ["X", "tau", "theta", "rho"],
               [Xc, Tau, theta, rho])
    _manifest(outdir, "hodograph", config, "ok", threads,
              rho_range=[float(rho.min()), float(rho.max())],
              theta_range=[float(theta.min()), float(theta.max())])
    _say(quiet, f"wrote {outdir / 'samples.csv'}")
    return 0


# ---------------------------------------------------------------------------
# verify


def _verify_polar_fields(config: dict, n: int):
    """One refinement level of (theta, rho) fields for the verify studies."""
    rect = config["rectangle"]
    coords = np.linspace(rect["coord"]["min"], rect["coord"]["max"], n)
    points = np.linspace(rect["point"]["min"], rect["point"]["max"], n)
    if config.get("negative_control") and config["study"] in ("asymptotic", "conservation"):
        C, P = np.meshgrid(coords, points, indexing="ij")
        theta = np.sin(2.0 * P) + 0.0 * C
        rho = np.ones_like(theta)
        return FieldSample(coords, points, {"theta": theta, "rho": rho})
    sol = config["solution"]
    if sol["kind"] == "constant_amplitude":
        prof = profile_from_config(sol["profile"])
        amp = sol["amplitude"]
        C, P = np.meshgrid(coords, points, indexing="ij")
        theta = np.asarray(prof(config["beta"] * amp**2 * C + P), dtype=float)
        rho = np.full_like(theta, amp)
        return FieldSample(coords, points, {"theta": theta, "rho": rho})
    data = HodographData(phase_fn=profile_from_config(sol["phase"]),
                         radial_fn=profile_from_config(sol["radial"]))
    rho, theta = sample_hodograph(data, config["beta"], coords, points, tuple(sol["seed"]))
    return FieldSample(coords, points, {"theta": theta, "rho": rho})


def _verify_study(config: dict):
    """Run the configured study; returns (report dict, passed flag)."""
    study = config["study"]
    target = config.get("order_target", 1.8)
    control = bool(config.get("negative_control", False))

    if study == "commutator":
        sym = config.get("symmetry")
        if sym is None:
            raise ConfigError("commutator study requires a 'symmetry' block")
        spec = SymmetrySpec(phase_fn=profile_from_config(sym["phase"]),
                            radial_fn=profile_from_config(sym["radial"]))
        if control:
            spec = PerturbedRadialControl(spec)
        rng = np.random.default_rng(config.get("seed", 0))
        n = config.get("jets", 100)
        jets = np.column_stack([
            rng.uniform(0.0, 2.0 * np.pi, n),
            rng.uniform(0.5, 1.5, n),
            rng.uniform(-1.0, 1.0, n),
            rng.uniform(-1.0, 1.0, n),
            rng.uniform(-1.0, 1.0, n),
            rng.uniform(-1.0, 1.0, n),
        ])
        beta = config.get("beta", 1.0)
        worst = commutator_residual(spec, beta, jets)
        phi = spec.characteristic(jets[:, 0], jets[:, 1], jets[:, 2], jets[:, 3])
        scale = max(1.0, float(np.max(np.abs(phi[0]))), float(np.max(np.abs(phi[1]))),
                    abs(beta) * float(np.max(jets[:, 1] ** 2)))
        tol = config.get("tol_factor", 1e-10) * scale
        passed = worst <= tol
        doc = {"study": study, "max_bracket": worst, "tolerance": tol,
               "n_jets": int(n), "negative_control": control, "passed": passed}
        if control:
            doc["control_confirmed"] = worst > tol
        return doc, passed

    if "beta" not in config:
        raise ConfigError(f"study {study!r} requires 'beta'")
    if study == "full":
        sol = config.get("solution")
        if sol is None or sol.get("kind") != "carroll":
            raise ConfigError("study 'full' requires a 'carroll' solution block")
        _validate(sol, VERIFY_SOLUTION_SCHEMAS["carroll"], where="solution block")
        m = modulus_from_config(sol["modulus"])
        wave = CarrollWave.from_modulus(m, sol["amplitude"], sol["wavenumber"])
        rect = config["rectangle"]
        samples = []
        rng = np.random.default_rng(config.get("seed", 0))
        for n in config["levels"]:
            coords = np.linspace(rect["coord"]["min"], rect["coord"]["max"], n)
            points = np.linspace(rect["point"]["min"], rect["point"]["max"], n)
            if control:
                vals = {k: rng.standard_normal((n, n)) for k in ("U", "V", "M", "N")}
            else:
                T, X = np.meshgrid(coords, points, indexing="ij")
                U, V, M, N = carroll_full_state(wave, X, T)
                vals = {"U": U, "V": V, "M": M, "N": N}
            samples.append(FieldSample(coords, points, vals))
        report = residual_full(samples, m, order_target=target)
        passed = report.passed
        doc = {"study": study, "order": report.order, "order_l2": report.order_l2,
               "linf": report.linf, "l2": report.l2, "target": target,
               "negative_control": control, "passed": passed}
        if control:
            doc["control_confirmed"] = report.order <= 0.5
        return doc, passed

    sol = config.get("solution")
    if study in ("asymptotic", "conservation", "linearized_symmetry"):
        if not control or study == "linearized_symmetry":
            if sol is None or sol.get("kind") not in VERIFY_SOLUTION_SCHEMAS:
                raise ConfigError(f"study {study!r} requires a solution block "
                                  f"(constant_amplitude or hodograph)")
            _validate(sol, VERIFY_SOLUTION_SCHEMAS[sol["kind"]], where="solution block")
        if "rectangle" not in config or "levels" not in config:
            raise ConfigError(f"study {study!r} requires 'rectangle' and 'levels'")
        samples = [_verify_polar_fields(config, n) for n in config["levels"]]

    if study == "asymptotic":
        report = residual_asymptotic(samples, config["beta"], order_target=target)
        passed = report.passed
        doc = {"study": study, "order": report.order, "order_l2": report.order_l2,
               "linf": report.linf, "l2": report.l2, "target": target,
               "negative_control": control, "passed": passed}
        if control:
            doc["control_confirmed"] = report.order <= 0.5
        return doc, passed

    if study == "conservation":
        cons = config.get("conservation")
        if cons is None:
            raise ConfigError("conservation study requires a 'conservation' block")
        spec = ConservationSpec(amp_weight=profile_from_config(cons["amp_weight"]),
                                angle_weight=profile_from_config(cons["angle_weight"]))
        try:
            report = conservation_residual(samples, config["beta"], spec, order_target=target)
        except NeitherOrientationDecays as exc:
            doc = {"study": study, "neither_orientation_decays": True,
                   "message": str(exc), "negative_control": control,
                   "passed": False}
            if control:
                doc["control_confirmed"] = True
            return doc, False
        passed = report.passed
        doc = {"study": study, "order": report.order, "order_l2": report.order_l2,
               "orientation": report.details.get("orientation"),
               "linf": report.linf, "l2": report.l2, "target": target,
               "negative_control": control, "passed": passed}
        if control:
            doc["control_confirmed"] = report.order <= 0.5
        return doc, passed

    sym = config.get("symmetry")
    if sym is None:
        raise ConfigError("linearized_symmetry study requires a 'symmetry' block")
    spec = SymmetrySpec(phase_fn=profile_from_config(sym["phase"]),
                        radial_fn=profile_from_config(sym["radial"]))
    if control:
        spec = AngleSquaredControl(spec)
    report = linearized_symmetry_residual(samples, config["beta"], spec, order_target=target)
    passed = report.passed
    doc = {"study": study, "order": report.order, "order_l2": report.order_l2,
           "linf": report.linf, "l2": report.l2, "target": target,
           "negative_control": control, "passed": passed}
    if control:
        doc["control_confirmed"] = report.order <= 0.5
    return doc, passed


def cmd_verify(config: dict, outdir: Path, threads: int, quiet: bool) -> int:
    _validate(config, VERIFY_SCHEMA)
    doc, passed = _verify_study(config)
    _write_json(outdir / "report.json", doc)
    _manifest(outdir, "verify", config, "ok", threads, passed=passed)
    _say(quiet, f"wrote {outdir / 'report.json'} ({'pass' if passed else 'FAIL'})")
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# convergence


def cmd_convergence(config: dict, outdir: Path, threads: int, quiet: bool) -> int:
    _validate(config, CONVERGENCE_SCHEMA)
    system = config["system"]
    oracle_cfg = config["oracle"]
    _validate(oracle_cfg, ORACLE_SCHEMAS[system], where="oracle block")
    grid_cfg = config["grid"]
    try:
        run_cfg = SimulationConfig(**config["run"])
    except ValueError as exc:
        raise ConfigError(str(exc))

    def make_grid(n):
        return Grid1D(n=n, a=grid_cfg["a"], b=grid_cfg["b"],
                      boundary=grid_cfg.get("boundary", "periodic"))

    if system == "full":
        if "modulus" not in config:
            raise ConfigError("system 'full' requires a 'modulus' block")
        from .exact import FullState
        m = modulus_from_config(config["modulus"])
        wave = CarrollWave.from_modulus(m, oracle_cfg["amplitude"], oracle_cfg["wavenumber"],
                                        oracle_cfg.get("polarization", 1))

        def run(n):
            grid = make_grid(n)
            return evolve_full(m, grid, FullState(*carroll_full_state(wave, grid.centers, 0.0)),
                               run_cfg)

        oracle = lambda x, t: np.stack(carroll_full_state(wave, x, t))
    elif system == "asymptotic":
        if "beta" not in config:
            raise ConfigError("system 'asymptotic' requires 'beta'")
        from .exact import StrainState
        beta = float(config["beta"])
        amp = oracle_cfg["amplitude"]
        prof = profile_from_config(oracle_cfg["profile"])

        def run(n):
            grid = make_grid(n)
            U, V = eval_asymptotic_linear(beta, amp, prof, 0.0, grid.centers)
            return evolve_asymptotic(beta, grid, StrainState(U, V), run_cfg)

        oracle = lambda tau, X: np.stack(eval_asymptotic_linear(beta, amp, prof, X, tau))
    else:
        if "beta" not in config:
            raise ConfigError("system 'scalar' requires 'beta'")
        beta = float(config["beta"])
        prof = profile_from_config(oracle_cfg["profile"])

        def run(n):
            grid = make_grid(n)
            return evolve_scalar(beta, grid, np.asarray(prof(grid.centers), dtype=float),
                                 run_cfg)

        oracle = lambda tau, X: sample_simple_wave(beta, prof, [X], tau)

    report = convergence_study(run, oracle, config["levels"],
                               order_target=config.get("order_target"),
                               order_tol=config.get("order_tol"))
    doc = {
        "system": system,
        "cells": report.cells,
        "spacings": report.spacings,
        "linf": report.linf,
        "l2": report.l2,
        "order": report.order,
        "order_l2": report.order_l2,
        "order_target": report.target,
        "order_tol": report.tol,
        "passed": report.passed,
    }
    _write_json(outdir / "report.json", doc)
    _manifest(outdir, "convergence", config, "ok", threads, passed=report.passed)
    _say(quiet, f"wrote {outdir / 'report.json'} ({'pass' if report.passed else 'FAIL'})")
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# entry point


HANDLERS = {
    "simulate": cmd_simulate,
    "exact": cmd_exact,
    "classify": cmd_classify,
    "hodograph": cmd_hodograph,
    "verify": cmd_verify,
    "convergence": cmd_convergence,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="shearwaves",
        description="Exact solutions, finite-volume evolution, and structural "
                    "verification for 1D nonlinear shear waves.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to a JSON run configuration")
    parser.add_argument("--out", default="out", help="artifact output directory")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads (recorded; execution is serial)")
    parser.add_argument("--quiet", action="store_true", help="suppress status output")
    args = parser.parse_args(argv)

    outdir = Path(args.out)
    try:
        config = _load_config(args.config)
        declared = config.get("command")
        if declared is not None and declared != args.command:
            raise ConfigError(
                f"config declares command {declared!r} but {args.command!r} was invoked")
        return HANDLERS[args.command](config, outdir, args.threads, args.quiet)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ShearWaveError as exc:
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
