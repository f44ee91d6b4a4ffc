"""Command-line entry point.

    fracbound VERB [--key value ...] [--config FILE] [--output PATH] [--format json|csv]
    fracbound run --config FILE
    fracbound sweep --verb VERB --axis KEY --values v1,v2,... [--key value ...]

Parameters come from the verb defaults, then the config file, then flags.
Every resolved parameter is written back under ``config`` in the JSON
output, so ``fracbound run --config out.json`` replays a run.

Exit codes: 0 success, 2 invalid input, 3 a required limit diverged or was
inconclusive, 4 numerical failure.
"""
import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from . import _kernels
from . import boundary_diag as bd
from . import hadamard as hd
from . import presets
from . import riemann_liouville as rl
from . import spectral_split as ss
from .convergence import loglog_slope
from .errors import FracboundError, NotConvergedError, ValidationError
from .function_space import Grid, NormSpec, SampledFunction

EXIT_OK, EXIT_INVALID, EXIT_DIVERGED, EXIT_FAILURE = 0, 2, 3, 4


# parsing helpers -------------------------------------------------------

def parse_complex(v) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float, complex)):
        return complex(v)
    s = str(v).strip().replace(" ", "").replace("i", "j")
    if s in ("j", "+j", "-j"):
        s = s.replace("j", "1j")
    elif s.endswith("j") and (len(s) == 1 or s[-2] in "+-"):
        s = s[:-1] + "1j"
    try:
        return complex(s)
    except ValueError as exc:
        raise ValidationError(f"cannot parse complex number {v!r}") from exc


def parse_floats(v):
    if isinstance(v, (list, tuple)):
        return [float(x) for x in v]
    return [float(x) for x in str(v).split(",") if x.strip()]


def parse_ints(v):
    return [int(round(x)) for x in parse_floats(v)]


def parse_norm(v) -> NormSpec:
    """sup | holder:ALPHA | lp:C,P | little:ALPHA,DELTA"""
    s = str(v).strip()
    kind, _, args = s.partition(":")
    vals = parse_floats(args) if args else []
    try:
        if kind == "sup":
            return NormSpec.sup()
        if kind == "holder":
            return NormSpec.holder(vals[0])
        if kind == "lp":
            return NormSpec.weighted(vals[0], vals[1])
        if kind == "little":
            return NormSpec.little_holder(vals[0], vals[1])
    except IndexError as exc:
        raise ValidationError(f"norm {s!r} is missing parameters") from exc
    raise ValidationError(f"unknown norm {s!r}")


def jsonable(x):
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return [[float(u.real), float(u.imag)] for u in x.ravel()] if x.ndim == 1 else \
                [jsonable(row) for row in x]
        return x.tolist()
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, dict):
        return {k: jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _read_text(path, what):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {what} {path}: {exc.strerror}") from exc


def _read_json(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{what} is not valid JSON: {exc}") from exc


def read_matrix(path) -> np.ndarray:
    """CSV rows of 're,im' pairs, or JSON nested arrays (numbers or [re, im])."""
    text = _read_text(path, "matrix file")
    if str(path).endswith(".json") or text.lstrip().startswith("["):
        data = _read_json(text, "matrix file")
        if isinstance(data, dict):
            data = data.get("matrix", data.get("entries"))
        return np.array([[parse_complex(c) for c in row] for row in data], dtype=np.complex128)
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            nums = [float(c) for c in line.split(",")]
        except ValueError as exc:
            raise ValidationError(f"bad matrix CSV row {line!r}") from exc
        if len(nums) % 2:
            raise ValidationError("matrix CSV rows must hold re,im pairs")
        rows.append([complex(a, b) for a, b in zip(nums[::2], nums[1::2])])
    return np.array(rows, dtype=np.complex128)


# parameter table --------------------------------------------------------

DEFAULTS = {
    "N": 1025, "a": 1.0, "x_min": 1e-18, "f": "linear", "f_csv": None,
    "z": "1", "z2": "1", "alpha": 0.5, "alpha2": 0.5, "mu": "1", "c": 0.0, "p": 2.0,
    "variant": "J", "direction": "contract", "t": 1.0, "s": 1.0, "s2": 0.0,
    "delta": 1.0, "norm": "sup", "sigmas": "0.04,0.02,0.01,0.005", "n": 1,
    "t_list": "0.1,0.5,1", "matrix": None, "r": None, "beta": None, "tol": 1e-10,
    "t_max": 20.0, "n_t": 400, "which": "T1", "theta": "upper",
    "sequence": "exponential", "N_schedule": None, "method": "lanczos",
    "boyd_nodes": 64, "seed": 0, "threads": 1,
}

_COMMON = ["seed", "threads"]
_RL_GRID = ["N", "f", "f_csv"]
_H_GRID = ["N", "a", "x_min", "f", "f_csv"]
_H_PARAMS = ["mu", "c", "p", "variant", "tol"]

VERB_KEYS = {
    "rl-apply": ["z"] + _RL_GRID,
    "rl-boundary": ["s", "sigmas", "norm"] + _RL_GRID,
    "rl-defect": ["z", "z2", "norm"] + _RL_GRID,
    "rl-norm-sup": ["z"],
    "rl-norm-l2": ["z", "t", "N", "sigmas", "method"],
    "rl-norm-holder": ["z", "alpha", "N"],
    "rl-embed-check": ["alpha"] + _RL_GRID,
    "hadamard-apply": ["alpha"] + _H_PARAMS + _H_GRID,
    "hadamard-boundary": ["s", "sigmas"] + _H_PARAMS + _H_GRID,
    "hadamard-defect": ["alpha", "alpha2"] + _H_PARAMS + _H_GRID,
    "cesaro-power": ["n", "tol"] + _H_GRID,
    "cesaro-boyd": ["n", "boyd_nodes"] + _H_GRID,
    "favard-check": ["alpha", "t_list"] + _RL_GRID,
    "dilation-apply": ["t", "mu", "direction"] + _H_GRID,
    "spectral-split": ["matrix", "delta", "r", "beta", "t_list"],
    "contour-semigroup": ["matrix", "delta", "r", "beta", "t", "which"],
    "laplace-check": ["matrix", "delta", "r", "beta", "z", "t_max", "n_t"],
    "diag-example": ["t", "theta", "sequence", "N", "N_schedule"],
}

VERB_DEFAULTS = {
    "rl-norm-l2": {"N": 2048, "sigmas": "0.04,0.02,0.01", "t": None},
    "rl-boundary": {"N": 2049},
    "hadamard-apply": {"N": 8192, "x_min": 1e-20},
    "hadamard-boundary": {"N": 8192, "x_min": 1e-20},
    "hadamard-defect": {"N": 16384, "x_min": 1e-30},
    "cesaro-power": {"N": 4096, "x_min": 1e-19, "tol": 1e-6},
    "cesaro-boyd": {"N": 8192, "x_min": 1e-20},
    "dilation-apply": {"N": 4096, "x_min": 1e-10},
    "diag-example": {"N": bd.DEFAULT_N},
    "laplace-check": {"z": "1"},
}

# verbs whose answer is a limit: a non-converged verdict exits with 3
REQUIRES_LIMIT = {"rl-boundary", "hadamard-boundary"}


def resolve(verb, *layers):
    if verb not in VERB_KEYS:
        raise ValidationError(f"unknown verb {verb!r}")
    keys = VERB_KEYS[verb] + _COMMON
    cfg = {k: DEFAULTS[k] for k in keys}
    cfg.update({k: v for k, v in VERB_DEFAULTS.get(verb, {}).items() if k in cfg})
    for layer in layers:
        for k, v in (layer or {}).items():
            if v is None:
                continue
            if k not in cfg:
                raise ValidationError(f"parameter {k!r} does not apply to {verb}")
            cfg[k] = v
    if "matrix" in cfg and cfg["matrix"] is None:
        raise ValidationError(f"{verb} needs --matrix")
    return cfg


# builders ---------------------------------------------------------------

def _closed_function(cfg) -> SampledFunction:
    if cfg.get("f_csv"):
        f = SampledFunction.from_csv(_read_text(cfg["f_csv"], "CSV") + "\n", kind="closed")
        return f
    return presets.sample(cfg["f"], Grid.uniform_unit(int(cfg["N"])))


def _log_function(cfg) -> SampledFunction:
    if cfg.get("f_csv"):
        return SampledFunction.from_csv(_read_text(cfg["f_csv"], "CSV") + "\n", kind="weighted")
    g = Grid.geometric_grid(float(cfg["a"]), int(cfg["N"]), float(cfg["x_min"]))
    return presets.sample(cfg["f"], g)


def _hparams(cfg):
    return hd.HadamardParams(parse_complex(cfg["mu"]), float(cfg["c"]), float(cfg["p"]),
                             str(cfg["variant"]))


def _operator_and_contour(cfg):
    a = ss.FiniteOperator(read_matrix(cfg["matrix"]))
    kw = {k: float(cfg[k]) for k in ("r", "beta") if cfg.get(k) is not None}
    spec = ss.default_contour(a, float(cfg["delta"]), **kw)
    return a, spec


def _function_result(f: SampledFunction, extra=None):
    res = {"function": {"nodes": f.nodes, "values": f.values}}
    meta = {k: v for k, v in f.meta.items() if k in ("u_trunc", "exponents", "zero_filled")}
    if "valid" in f.meta:
        meta["valid_nodes"] = int(np.count_nonzero(f.meta["valid"]))
        meta["valid_from"] = float(f.nodes[np.argmax(f.meta["valid"])]) if meta["valid_nodes"] else None
    if "tail_bound" in f.meta:
        meta["tail_bound_min"] = float(np.min(f.meta["tail_bound"]))
    if meta:
        res["meta"] = meta
    res.update(extra or {})
    return res, f


# verbs ------------------------------------------------------------------

def v_rl_apply(cfg):
    return _function_result(rl.rl_apply(parse_complex(cfg["z"]), _closed_function(cfg)))


def v_rl_boundary(cfg):
    g, rep = rl.rl_boundary_apply(float(cfg["s"]), _closed_function(cfg),
                                  parse_floats(cfg["sigmas"]), parse_norm(cfg["norm"]))
    return _function_result(g, {"report": rep.to_dict()})


def v_rl_defect(cfg):
    d = rl.rl_semigroup_defect(parse_complex(cfg["z"]), parse_complex(cfg["z2"]),
                               _closed_function(cfg), parse_norm(cfg["norm"]))
    return {"value": d}, None


def v_rl_norm_sup(cfg):
    z = parse_complex(cfg["z"])
    return {"value": rl.rl_opnorm_sup(z), "scaled": rl.rl_opnorm_sup(z) * z.real / abs(z)}, None


def v_rl_norm_l2(cfg):
    # t, when set, selects the boundary order z = i t
    z = complex(0.0, float(cfg["t"])) if cfg["t"] is not None else parse_complex(cfg["z"])
    val, rep = rl.rl_opnorm_l2(z, int(cfg["N"]), parse_floats(cfg["sigmas"]),
                               method=cfg["method"], return_report=True)
    out = {"value": val}
    if rep is not None:
        out["report"] = rep.to_dict()
    return out, None


def holder_bounds(z: complex, alpha: float):
    """Proved upper bounds that apply at this (z, alpha)."""
    out = {}
    if 0 < abs(z) <= (1 - alpha) / 2:
        out["small_order_bound"] = rl.holder_small_order_bound(z, alpha)
    if z.imag == 0 and z.real == alpha:
        out["real_order_bound"] = rl.holder_real_order_bound(alpha)
    return out


def v_rl_norm_holder(cfg):
    z, alpha = parse_complex(cfg["z"]), float(cfg["alpha"])
    val = rl.rl_opnorm_holder_estimate(z, alpha, N=int(cfg["N"]))
    return {"value": val, "bounds": holder_bounds(z, alpha)}, None


def v_rl_embed_check(cfg):
    alpha = float(cfg["alpha"])
    val = rl.rl_regularity_embedding_check(alpha, _closed_function(cfg))
    return {"value": val, "bound": rl.holder_real_order_bound(alpha)}, None


def v_hadamard_apply(cfg):
    return _function_result(hd.hadamard_apply(parse_complex(cfg["alpha"]), _hparams(cfg),
                                              _log_function(cfg), float(cfg["tol"])))


def v_hadamard_boundary(cfg):
    g, rep = hd.hadamard_boundary_apply(float(cfg["s"]), _hparams(cfg), _log_function(cfg),
                                        parse_floats(cfg["sigmas"]), float(cfg["tol"]))
    return _function_result(g, {"report": rep.to_dict()})


def v_hadamard_defect(cfg):
    d = hd.hadamard_semigroup_defect(parse_complex(cfg["alpha"]), parse_complex(cfg["alpha2"]),
                                     _hparams(cfg), _log_function(cfg), float(cfg["tol"]))
    return {"value": d}, None


def v_cesaro_power(cfg):
    f = _log_function(cfg)
    n, tol = int(cfg["n"]), float(cfg["tol"])
    return _function_result(hd.cesaro_power(n, f, tol), {"value": hd.cesaro_defect(n, f, tol)})


def v_cesaro_boyd(cfg):
    return _function_result(hd.cesaro_boyd_form(int(cfg["n"]), _log_function(cfg),
                                                int(cfg["boyd_nodes"])))


def v_favard_check(cfg):
    val = hd.favard_inclusion_check(float(cfg["alpha"]), _closed_function(cfg),
                                    parse_floats(cfg["t_list"]))
    return {"value": val, "bound": 1.0}, None


def v_dilation_apply(cfg):
    return _function_result(hd.dilation_semigroup_apply(float(cfg["t"]), parse_complex(cfg["mu"]),
                                                        cfg["direction"], _log_function(cfg)))


def v_spectral_split(cfg):
    a, spec = _operator_and_contour(cfg)
    delta = float(cfg["delta"])
    p = ss.projection_P(a, spec, delta)
    spl = ss.split_spaces(a, p)
    samples = {}
    for t in parse_floats(cfg["t_list"]):
        t1 = ss.contour_T1(a, t, spec, delta)
        samples[repr(t)] = {"T1": t1, "T2": ss.contour_T2(a, t, spec, delta),
                            "T1_oracle_error": float(np.abs(t1 - ss.oracle_T1(a, t, delta)).max())}
    res = {
        "contour": spec.to_dict(),
        "P": p,
        "defects": {
            "idempotency": float(np.abs(p @ p - p).max()),
            "commutation": float(np.abs(p @ a.entries - a.entries @ p).max()),
            "oracle": float(np.abs(p - ss.oracle_P(a, delta)).max()),
        },
        "split": spl.to_dict(),
        "basis1": spl.basis1,
        "basis2": spl.basis2,
        "semigroups": samples,
    }
    return res, None


def v_contour_semigroup(cfg):
    a, spec = _operator_and_contour(cfg)
    fn = ss.contour_T1 if cfg["which"] == "T1" else ss.contour_T2
    if cfg["which"] not in ("T1", "T2"):
        raise ValidationError("which must be T1 or T2")
    m = fn(a, float(cfg["t"]), spec, float(cfg["delta"]))
    orc = (ss.oracle_T1 if cfg["which"] == "T1" else ss.oracle_T2)(a, float(cfg["t"]), float(cfg["delta"]))
    return {"matrix": m, "oracle_error": float(np.abs(m - orc).max()), "contour": spec.to_dict()}, None


def v_laplace_check(cfg):
    a, spec = _operator_and_contour(cfg)
    d = ss.laplace_consistency_check(a, spec, parse_complex(cfg["z"]), float(cfg["t_max"]),
                                     int(cfg["n_t"]), float(cfg["delta"]))
    return {"value": d}, None


def v_diag_example(cfg):
    n = int(cfg["N"])
    x = presets.sequence_preset(cfg["sequence"], n)
    t = float(cfg["t"])
    res = {}
    th = cfg["theta"]
    if th == "upper":
        res["upper_norm"] = bd.upper_boundary_norm(t, x)
    elif th == "lower":
        sched = parse_ints(cfg["N_schedule"]) if cfg["N_schedule"] else bd.default_schedule(n)
        res["membership"] = bd.lower_boundary_membership(x, t, sched)
    else:
        r = bd.diag_apply(bd.SectorPoint(t, float(th)), x, n)
        res.update(norm=r.norm, overflow=r.overflow, overflow_count=len(r.overflow_index))
    return res, None


VERBS = {
    "rl-apply": v_rl_apply, "rl-boundary": v_rl_boundary, "rl-defect": v_rl_defect,
    "rl-norm-sup": v_rl_norm_sup, "rl-norm-l2": v_rl_norm_l2, "rl-norm-holder": v_rl_norm_holder,
    "rl-embed-check": v_rl_embed_check, "hadamard-apply": v_hadamard_apply,
    "hadamard-boundary": v_hadamard_boundary, "hadamard-defect": v_hadamard_defect,
    "cesaro-power": v_cesaro_power, "cesaro-boyd": v_cesaro_boyd,
    "favard-check": v_favard_check, "dilation-apply": v_dilation_apply,
    "spectral-split": v_spectral_split, "contour-semigroup": v_contour_semigroup,
    "laplace-check": v_laplace_check, "diag-example": v_diag_example,
}


def metadata():
    return {"fracbound": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "kernels": _kernels.BACKEND}


def run(verb, cfg):
    """Execute one verb; returns (document, function-or-None, exit status)."""
    result, func = VERBS[verb](cfg)
    status = EXIT_OK
    rep = result.get("report")
    if verb in REQUIRES_LIMIT and rep is not None and rep["verdict"] != "converged":
        status = EXIT_DIVERGED
    doc = {"verb": verb, "config": dict(cfg, verb=verb), "metadata": metadata(),
           "result": jsonable(result), "status": status}
    return doc, func, status


def sweep(verb, axis, values, base_cfg):
    """One row per axis value: axis, real value, scaled value and slope.

    ``axis='sigma'`` varies Re z of the order at fixed Im z.
    """
    rows = []
    for v in values:
        cfg = dict(base_cfg)
        if axis == "sigma":
            z = parse_complex(cfg["z"])
            cfg["z"] = [float(v), z.imag]
        elif axis not in cfg:
            raise ValidationError(f"{axis!r} is not a parameter of {verb}")
        else:
            cfg[axis] = v
        res, _f = VERBS[verb](cfg)
        rows.append([float(v), float(res["value"])])
    xs = np.array([r[0] for r in rows])
    ys = np.array([r[1] for r in rows])
    slope = loglog_slope(xs, ys) if np.all(xs > 0) and np.all(ys > 0) and len(rows) > 1 else float("nan")
    table = []
    for i, (x, y) in enumerate(rows):
        local = float("nan")
        if i > 0 and x > 0 and y > 0 and rows[i - 1][0] > 0 and rows[i - 1][1] > 0:
            local = math.log(y / rows[i - 1][1]) / math.log(x / rows[i - 1][0])
        table.append({"axis": axis, "x": x, "value": y, "local_slope": local, "slope": slope})
    return table


SWEEP_COLUMNS = ["axis", "x", "value", "local_slope", "slope"]


# argument handling --------------------------------------------------------

def _add_param_flags(p):
    for k in DEFAULTS:
        flag = "--" + k.replace("_", "-")
        p.add_argument(flag, dest=k, default=None)


def build_parser():
    ap = argparse.ArgumentParser(prog="fracbound",
                                 description="Fractional integrals of complex order: apply, "
                                             "boundary limits, norms, spectral splitting.")
    ap.add_argument("--version", action="version", version=f"fracbound {__version__}")
    sub = ap.add_subparsers(dest="verb", required=True)
    for verb in list(VERBS) + ["run", "sweep"]:
        p = sub.add_parser(verb)
        p.add_argument("--config", default=None, help="JSON file (a previous output works)")
        p.add_argument("--output", "-o", default=None)
        p.add_argument("--format", choices=["json", "csv"], default="json")
        if verb == "sweep":
            p.add_argument("--verb", dest="sweep_verb", required=True, choices=list(VERBS))
            p.add_argument("--axis", required=True)
            p.add_argument("--values", required=True)
        _add_param_flags(p)
    return ap


def _load_config(path):
    if not path:
        return None, {}
    data = _read_json(_read_text(path, "config file"), "config file")
    if not isinstance(data, dict):
        raise ValidationError("config file must hold a JSON object")
    if "config" in data and isinstance(data["config"], dict):
        data = data["config"]
    data = dict(data)
    verb = data.pop("verb", None)
    return verb, data


def _emit(text, path):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _function_csv(f: SampledFunction):
    return f.to_csv()


def _main(argv):
    args = build_parser().parse_args(argv)
    flags = {k: getattr(args, k) for k in DEFAULTS if getattr(args, k, None) is not None}
    file_verb, file_cfg = _load_config(args.config)
    if args.verb == "run":
        if not file_verb:
            raise ValidationError("run needs a config file that names its verb")
        verb = file_verb
    elif args.verb == "sweep":
        verb = args.sweep_verb
    else:
        verb = args.verb
    if file_verb and args.verb != "run" and file_verb != verb:
        file_cfg = {k: v for k, v in file_cfg.items() if k in VERB_KEYS.get(verb, [])}
    cfg = resolve(verb, file_cfg, flags)

    if args.verb == "sweep":
        table = sweep(verb, args.axis, parse_floats(args.values), cfg)
        if args.format == "csv":
            lines = [",".join(SWEEP_COLUMNS)]
            lines += [",".join(str(r[c]) for c in SWEEP_COLUMNS) for r in table]
            _emit("\n".join(lines) + "\n", args.output)
        else:
            doc = {"verb": "sweep", "config": dict(cfg, verb=verb),
                   "sweep": {"axis": args.axis, "values": parse_floats(args.values)},
                   "metadata": metadata(), "result": jsonable(table)}
            _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.output)
        return EXIT_OK

    doc, func, status = run(verb, cfg)
    if args.format == "csv" and func is not None:
        _emit(_function_csv(func), args.output)
        if args.output:
            Path(str(args.output) + ".meta.json").write_text(
                json.dumps({k: doc[k] for k in ("verb", "config", "metadata", "status")},
                           indent=2, sort_keys=True) + "\n")
    else:
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.output)
    return status


def main(argv=None) -> int:
    try:
        return _main(sys.argv[1:] if argv is None else argv)
    except ValidationError as exc:
        print(f"fracbound: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NotConvergedError as exc:
        print(f"fracbound: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (FracboundError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"fracbound: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())
