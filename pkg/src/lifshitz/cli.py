"""Command-line front end.

Subcommands compute energies, free energies, pressures, mode spectra, pole
catalogs, route-equivalence checks, finite-system fluctuation-dissipation
checks and the Drude anomaly term, emitting JSON reports (or CSV rows for
sweeps) that echo every input.  Identical invocations produce byte-identical
output; machine-readable errors go to standard error as single-line JSON
with exit status 2 (validation) or 3 (numerical non-convergence).
"""

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import casimir
from .dispersion import DRUDE, PLASMA, DispersionModel
from .errors import (IntegratorDivergence, LifshitzError, NoConvergence,
                     NonPositiveD, OscillatoryDivergence, StepUnderflow,
                     UnresolvedRoot, UnwrapError, ValidationError)
from .fdt_lab import (QuantumSystem, fdt_verify, truncated_oscillator,
                      two_level_system)
from .lifshitz_core import CavityConfig, KPoint, find_modes, sample_phase_curve
from .response import (ToyGreenModel, drude_pole_catalog,
                       fdt_compatibility_report, green_plasma_lines)

ENERGY_UNITS = "hbar*omega_p^3/c^2 per unit area"
PRESSURE_UNITS = "hbar*omega_p^4/c^3"
SWEEPABLE = ("a", "T", "gamma", "k")
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

NUMERICAL_ERRORS = (NoConvergence, UnresolvedRoot, UnwrapError, StepUnderflow,
                    OscillatoryDivergence, NonPositiveD, IntegratorDivergence)


def build_parser():
    p = argparse.ArgumentParser(
        prog="lifshitz",
        description="Casimir energies of parallel plates and exact "
                    "fluctuation-dissipation checks on finite systems.")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, temperature=False):
        sp.add_argument("--config", help="key = value file; flags override it")
        sp.add_argument("--model", choices=(PLASMA, DRUDE), default=None)
        sp.add_argument("--omega-p", type=float, default=None,
                        help="plasma frequency (frequency unit), default 1")
        sp.add_argument("--gamma", type=float, default=None,
                        help="Drude dissipation parameter, default 0")
        sp.add_argument("--a", type=float, default=None,
                        help="gap half-width (the gap is 2a), default 1")
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--sigma", choices=("TE", "TM"), default=None)
        if temperature:
            sp.add_argument("--temperature", "-T", type=float, default=None)
        sp.add_argument("--sweep", default=None, metavar="PARAM=V1,V2,...",
                        help=f"sweep one of {SWEEPABLE}; emits CSV rows")
        sp.add_argument("--csv", action="store_true",
                        help="CSV output (implied by --sweep)")
        sp.add_argument("--plot", default=None, metavar="FILE",
                        help="render the sweep to a figure file as well")
        sp.add_argument("--verbose", action="store_true")

    sp = sub.add_parser("energy", help="zero-temperature energy per unit area")
    add_common(sp)

    sp = sub.add_parser("free-energy", help="finite-temperature Matsubara sum")
    add_common(sp, temperature=True)
    sp.add_argument("--m-max", type=int, default=None,
                    help="fixed Matsubara truncation (default adaptive)")

    sp = sub.add_parser("pressure", help="-dE/d(2a); negative = attraction")
    add_common(sp, temperature=True)

    sp = sub.add_parser("spectrum", help="surface/waveguide modes at fixed k")
    add_common(sp)
    sp.add_argument("--k", type=float, default=None, help="transverse wavenumber")
    sp.add_argument("--phase-points", type=int, default=65,
                    help="samples of the continuum phase curve (0 disables)")

    sp = sub.add_parser("poles", help="pole catalog of the toy Green function")
    add_common(sp)
    sp.add_argument("--g", type=float, default=1.0, help="coupling constant")
    sp.add_argument("--beta", type=float, default=1.0,
                    help="inverse temperature for the compatibility verdict")

    sp = sub.add_parser("equivalence-check",
                        help="real-axis bracket vs imaginary-axis integral")
    add_common(sp)
    sp.add_argument("--k", type=float, default=None)
    sp.add_argument("--omega-cut", type=float, default=None)

    sp = sub.add_parser("fdt-check",
                        help="Callen-Welton check on a finite system")
    sp.add_argument("--preset", default=None,
                    help="'two-level' or 'oscillator:N'")
    sp.add_argument("--matrix-file", default=None,
                    help="dense complex Hamiltonian, rows of 're im' pairs")
    sp.add_argument("--observable-file", default=None,
                    help="observable matrix in the same format")
    sp.add_argument("--observable", default=None,
                    help="preset observable name (default sx / x)")
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--verbose", action="store_true")

    sp = sub.add_parser("anomaly", help="Drude pure-imaginary free-energy term")
    add_common(sp, temperature=True)
    sp.add_argument("--m-max", type=int, default=20)
    return p


def read_config_file(path):
    """Plain `key = value` lines; '#' starts a comment."""
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"bad config line: {raw.strip()!r}")
            key, val = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = val
    return values


def resolve(args, name, default, cast=float):
    """Flag value if given, else config-file value, else default."""
    val = getattr(args, name, None)
    if val is not None:
        return val
    cfg = getattr(args, "_config_values", {})
    if name in cfg:
        raw = cfg[name]
        return raw if cast is str else cast(raw)
    return default


def build_model(args):
    kind = resolve(args, "model", PLASMA, cast=str)
    omega_p = resolve(args, "omega_p", 1.0)
    gamma = resolve(args, "gamma", 0.0)
    if gamma > 0 and kind == PLASMA and getattr(args, "model", None) is None \
            and "model" not in getattr(args, "_config_values", {}):
        kind = DRUDE  # a bare nonzero gamma implies the dissipative model
    return DispersionModel(kind, omega_p, gamma)


def build_cavity(args, sigma=None):
    model = build_model(args)
    a = resolve(args, "a", 1.0)
    sig = sigma if sigma is not None else resolve(args, "sigma", None, cast=str)
    return CavityConfig(half_gap=a, model=model, sigma=sig)


def echo_inputs(args, extra=None):
    fields = {}
    for name in ("model", "omega_p", "gamma", "a", "sigma", "temperature",
                 "tol", "k", "m_max", "beta", "g", "omega_cut", "preset"):
        if hasattr(args, name):
            val = getattr(args, name)
            if val is None and name in getattr(args, "_config_values", {}):
                val = args._config_values[name]
            if val is not None:
                fields[name] = val
    if extra:
        fields.update(extra)
    return fields


def emit_json(payload, verbose=False, human=None):
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2,
                                default=_jsonify))
    sys.stdout.write("\n")
    if verbose and human:
        sys.stderr.write(human + "\n")


def _jsonify(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj)}")


def load_matrix(path):
    rows = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            nums = [float(tok) for tok in line.split()]
            if len(nums) % 2:
                raise ValidationError(f"odd float count in matrix row: {raw!r}")
            rows.append([complex(nums[i], nums[i + 1])
                         for i in range(0, len(nums), 2)])
    m = np.array(rows, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"matrix in {path} is not square: {m.shape}")
    return m


# --------------------------------------------------------- computations

def _check_overrides(overrides, allowed):
    unknown = set(overrides) - set(allowed)
    if unknown:
        raise ValidationError(
            f"sweep parameter {sorted(unknown)} not applicable here; "
            f"this subcommand sweeps {sorted(allowed)}")


def compute_energy(args, overrides=None):
    o = overrides or {}
    _check_overrides(o, ("a", "gamma"))
    model = DispersionModel(
        o.get("model_kind", build_model(args).kind),
        o.get("omega_p", build_model(args).omega_p),
        o.get("gamma", build_model(args).gamma))
    a = o.get("a", resolve(args, "a", 1.0))
    tol = resolve(args, "tol", 1e-8)
    cfg = CavityConfig(half_gap=a, model=model,
                       sigma=resolve(args, "sigma", None, cast=str))
    res = casimir.energy_imaginary_axis(cfg, tol=tol)
    gap = 2.0 * a
    return {
        "value": res.value,
        "scaled_gap_cubed": res.value * gap ** 3,
        "units": ENERGY_UNITS,
        "route": res.route,
        "truncation_report": res.truncation_report,
        "checks": {"negative": res.value < 0},
    }


def compute_free_energy(args, overrides=None):
    o = overrides or {}
    _check_overrides(o, ("a", "gamma", "T"))
    base = build_model(args)
    model = DispersionModel(o.get("model_kind", base.kind),
                            o.get("omega_p", base.omega_p),
                            o.get("gamma", base.gamma))
    a = o.get("a", resolve(args, "a", 1.0))
    t = o.get("T", resolve(args, "temperature", None))
    if t is None:
        raise ValidationError("free energy needs --temperature")
    tol = resolve(args, "tol", 1e-8)
    m_max = getattr(args, "m_max", None)
    grid = casimir.MatsubaraGrid(temperature=t, m_max=m_max)
    cfg = CavityConfig(half_gap=a, model=model,
                       sigma=resolve(args, "sigma", None, cast=str))
    res = casimir.free_energy_matsubara(cfg, grid, tol=tol)
    return {
        "value": res.value,
        "units": ENERGY_UNITS,
        "route": res.route,
        "truncation_report": res.truncation_report,
        "checks": {"negative": res.value < 0},
    }


def compute_pressure(args, overrides=None):
    o = overrides or {}
    _check_overrides(o, ("a", "gamma", "T"))
    base = build_model(args)
    model = DispersionModel(o.get("model_kind", base.kind),
                            o.get("omega_p", base.omega_p),
                            o.get("gamma", base.gamma))
    a = o.get("a", resolve(args, "a", 1.0))
    t = o.get("T", resolve(args, "temperature", None))
    tol = resolve(args, "tol", 1e-8)
    cfg = CavityConfig(half_gap=a, model=model,
                       sigma=resolve(args, "sigma", None, cast=str))
    thermal = casimir.MatsubaraGrid(t) if t is not None else None
    value = casimir.casimir_pressure(cfg, thermal=thermal, tol=tol)
    route = casimir.ROUTE_MATSUBARA if thermal else casimir.ROUTE_IMAGINARY_AXIS
    return {
        "value": value,
        "units": PRESSURE_UNITS,
        "route": route,
        "truncation_report": {"tolerance": tol},
        "checks": {"attractive": value < 0},
    }


def compute_spectrum(args, overrides=None):
    o = overrides or {}
    _check_overrides(o, ("a", "k"))
    sigma = resolve(args, "sigma", None, cast=str)
    if sigma is None:
        raise ValidationError("spectrum needs --sigma TE|TM")
    cfg = build_cavity(args, sigma=sigma)
    if "a" in o or "gamma" in o:
        cfg = CavityConfig(half_gap=o.get("a", cfg.half_gap),
                           model=cfg.model, sigma=sigma)
    k = o.get("k", resolve(args, "k", None))
    if k is None:
        raise ValidationError("spectrum needs --k")
    kp = KPoint.for_model(k, cfg.model)
    spec = find_modes(cfg, kp)
    out = {
        "surface_modes": list(spec.surface_modes),
        "waveguide_modes": list(spec.waveguide_modes),
        "omega_minus": kp.omega_minus,
        "omega_plus": kp.omega_plus,
        "route": "ModeSumRealAxis",
        "units": "omega in the chosen frequency unit",
        "truncation_report": {"mode_residual_tolerance": 1e-9},
        "checks": {"mode_count": len(spec.modes)},
    }
    n_phase = getattr(args, "phase_points", 0) or 0
    if n_phase > 1:
        ws, deltas = sample_phase_curve(cfg, kp, 3.0 * kp.omega_plus,
                                        n0=n_phase)
        step = max(1, len(ws) // n_phase)
        spec.phase_grid = ws[::step]
        spec.phase_curve = deltas[::step]
        out["phase_curve"] = [[float(w), float(d)]
                              for w, d in zip(spec.phase_grid,
                                              spec.phase_curve)]
    return out


def compute_poles(args, overrides=None):
    o = overrides or {}
    _check_overrides(o, ("gamma",))
    base = build_model(args)
    model = DispersionModel(o.get("model_kind", base.kind),
                            o.get("omega_p", base.omega_p),
                            o.get("gamma", base.gamma))
    toy = ToyGreenModel(resolve(args, "g", 1.0), model)
    if model.dissipative:
        catalog = drude_pole_catalog(toy)
    else:
        _, catalog = green_plasma_lines(
            toy if model.kind == PLASMA else
            ToyGreenModel(toy.g, DispersionModel(PLASMA, model.omega_p)))
    verdict = fdt_compatibility_report(toy, resolve(args, "beta", 1.0))
    return {
        "poles": [{"location": p.location, "residue": p.residue,
                   "class": p.kind, "bypass": p.bypass}
                  for p in catalog.poles],
        "route": "PoleCatalog",
        "units": "omega in the chosen frequency unit",
        "truncation_report": {},
        "checks": {"fdt_verdict": verdict.verdict},
    }


def compute_equivalence(args, overrides=None):
    o = overrides or {}
    _check_overrides(o, ("a", "k"))
    sigma = resolve(args, "sigma", None, cast=str)
    if sigma is None:
        raise ValidationError("equivalence-check needs --sigma TE|TM")
    cfg = build_cavity(args, sigma=sigma)
    if "a" in o:
        cfg = CavityConfig(half_gap=o["a"], model=cfg.model, sigma=sigma)
    k = o.get("k", resolve(args, "k", None))
    if k is None:
        raise ValidationError("equivalence-check needs --k")
    tol = resolve(args, "tol", 1e-9)
    kp = KPoint.for_model(k, cfg.model)
    rep = casimir.energy_real_axis_per_k(
        cfg, kp, omega_cut=resolve(args, "omega_cut", None), tol=tol)
    if not rep.passed:
        raise NoConvergence(
            f"route mismatch {rep.mismatch:.3e} exceeds bound {rep.bound:.3e}")
    return {
        "mode_sum_part": rep.mode_sum_part,
        "continuum_part": rep.continuum_part,
        "imaginary_axis_part": rep.imaginary_axis_part,
        "mismatch": rep.mismatch,
        "bound": rep.bound,
        "units": ENERGY_UNITS + " (per k, before the k integral)",
        "route": "ModeSumRealAxis vs ImaginaryAxis",
        "truncation_report": rep.details.get("quadrature_errors", {}),
        "checks": {"passed": rep.passed},
    }


def compute_fdt_check(args):
    preset = getattr(args, "preset", None)
    matrix_file = getattr(args, "matrix_file", None)
    beta = args.beta
    if (preset is None) == (matrix_file is None):
        raise ValidationError("give exactly one of --preset / --matrix-file")
    if preset:
        if preset == "two-level":
            sys_ = two_level_system(beta)
            obs = args.observable or "sx"
        elif preset.startswith("oscillator:"):
            dim = int(preset.split(":", 1)[1])
            sys_ = truncated_oscillator(beta, dim=dim)
            obs = args.observable or "x"
        else:
            raise ValidationError(f"unknown preset {preset!r}")
    else:
        h = load_matrix(matrix_file)
        if not args.observable_file:
            raise ValidationError("--matrix-file needs --observable-file")
        a = load_matrix(args.observable_file)
        sys_ = QuantumSystem(h, {"A": a}, beta)
        obs = "A"
    rep = fdt_verify(sys_, obs)
    return {
        "lhs": rep.lhs,
        "rhs": rep.rhs,
        "abs_error": rep.abs_error,
        "units": "observable^2",
        "route": "ExactLineSpectrum",
        "truncation_report": {},
        "checks": {"within_1e-10": rep.abs_error < 1e-10},
    }


def compute_anomaly(args, overrides=None):
    o = overrides or {}
    _check_overrides(o, ("a", "gamma", "T"))
    base = build_model(args)
    gamma = o.get("gamma", base.gamma)
    model = DispersionModel(DRUDE if gamma > 0 else base.kind,
                            o.get("omega_p", base.omega_p), gamma)
    a = o.get("a", resolve(args, "a", 1.0))
    t = o.get("T", resolve(args, "temperature", None))
    if t is None:
        raise ValidationError("anomaly needs --temperature")
    tol = resolve(args, "tol", 1e-8)
    cfg = CavityConfig(half_gap=a, model=model)
    res = casimir.drude_anomaly(cfg, t, m_max=args.m_max, tol=tol)
    return {
        "value": res.value,
        "abs_value": abs(res.value),
        "units": ENERGY_UNITS,
        "route": "MatsubaraSineSum",
        "truncation_report": {
            "per_m": list(res.per_m),
            "tail_estimate": res.tail_estimate,
            "noise_floor": res.noise_floor,
            "branch_ambiguity": res.branch_ambiguity,
            "converged": res.converged,
        },
        "checks": {
            "pure_imaginary": abs(res.value.real)
            <= 1e-10 * max(abs(res.value), 1e-300),
            "zero_iff_gamma_zero": (abs(res.value) == 0.0) == (gamma == 0.0),
        },
    }


COMPUTERS = {
    "energy": compute_energy,
    "free-energy": compute_free_energy,
    "pressure": compute_pressure,
    "spectrum": compute_spectrum,
    "poles": compute_poles,
    "equivalence-check": compute_equivalence,
    "anomaly": compute_anomaly,
}

SWEEP_OVERRIDE_KEY = {"a": "a", "T": "T", "gamma": "gamma", "k": "k"}

COMMAND_SWEEPABLE = {
    "energy": ("a", "gamma"),
    "free-energy": ("a", "gamma", "T"),
    "pressure": ("a", "gamma", "T"),
    "spectrum": ("a", "k"),
    "poles": ("gamma",),
    "equivalence-check": ("a", "k"),
    "anomaly": ("a", "gamma", "T"),
}


def run_sweep(args, compute):
    spec = args.sweep
    if "=" not in spec:
        raise ValidationError("--sweep expects PARAM=V1,V2,...")
    param, _, raw = spec.partition("=")
    param = param.strip()
    if param not in SWEEPABLE:
        raise ValidationError(f"sweep parameter must be one of {SWEEPABLE}")
    if param not in COMMAND_SWEEPABLE.get(args.command, ()):
        raise ValidationError(
            f"{args.command} sweeps {COMMAND_SWEEPABLE.get(args.command)},"
            f" not {param!r}")
    values = [float(tok) for tok in raw.split(",") if tok.strip()]
    if not values:
        raise ValidationError("sweep needs at least one value")
    rows = []
    columns = [param]
    jobs = [(param, v) for v in values]
    threads = int(os.environ.get("LIFSHITZ_THREADS", "1") or "1")

    def one(job):
        pname, v = job
        try:
            out = compute(args, overrides={SWEEP_OVERRIDE_KEY[pname]: v})
            row = {pname: v, "error": ""}
            for key, val in out.items():
                if isinstance(val, (int, float)) and not isinstance(val, bool):
                    row[key] = val
            if isinstance(out.get("value"), complex):
                row["value_re"] = out["value"].real
                row["value_im"] = out["value"].imag
            return row
        except LifshitzError as exc:
            return {pname: v, "error": f"{type(exc).__name__}: {exc}"}

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, jobs))
    else:
        rows = [one(job) for job in jobs]
    for row in rows:
        for key in row:
            if key not in columns and key != "error":
                columns.append(key)
    columns.append("error")
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, restval="",
                            lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    sys.stdout.write(buf.getvalue())
    if args.plot:
        from .plots import render_sweep
        render_sweep(param, [r for r in rows if not r["error"]], columns,
                     args.plot, title=f"{args.command} vs {param}")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            args._config_values = read_config_file(args.config)
        else:
            args._config_values = {}
        if args.command == "fdt-check":
            out = compute_fdt_check(args)
            payload = {"inputs": echo_inputs(args, extra={
                k: getattr(args, k) for k in
                ("preset", "matrix_file", "observable_file", "observable")
                if getattr(args, k, None)})}
            payload.update(out)
            emit_json(payload, verbose=getattr(args, "verbose", False))
            return 0
        compute = COMPUTERS[args.command]
        if getattr(args, "sweep", None):
            return run_sweep(args, compute)
        out = compute(args)
        if getattr(args, "csv", False):
            row = {k: v for k, v in out.items()
                   if isinstance(v, (int, float)) and not isinstance(v, bool)}
            if isinstance(out.get("value"), complex):
                row["value_re"] = out["value"].real
                row["value_im"] = out["value"].imag
            buf = io.StringIO()
            writer = csv.DictWriter(buf, fieldnames=list(row),
                                    lineterminator="\n")
            writer.writeheader()
            writer.writerow(row)
            sys.stdout.write(buf.getvalue())
            return 0
        payload = {"inputs": echo_inputs(args)}
        payload.update(out)
        emit_json(payload, verbose=getattr(args, "verbose", False),
                  human=f"{args.command}: value = {out.get('value')}")
        return 0
    except NUMERICAL_ERRORS as exc:
        _emit_error(exc)
        return EXIT_NUMERICAL
    except LifshitzError as exc:
        _emit_error(exc)
        return EXIT_VALIDATION
    except (ValueError, OSError) as exc:
        _emit_error(exc)
        return EXIT_VALIDATION


def _emit_error(exc):
    sys.stderr.write(json.dumps(
        {"error": type(exc).__name__, "message": str(exc)},
        sort_keys=True) + "\n")


if __name__ == "__main__":
    sys.exit(main())
