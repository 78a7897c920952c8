"""Command-line front end.

Exit codes: 0 success, 1 malformed or inadmissible input, 2 residual above
--residual-tol or a domain violation.
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from polydyn import dynamics, funceq, geometry, normalform, polyauto
from polydyn.geometry import DomainError, cayley_inv, complex_from_json
from polydyn.moebius import EPS_CLS, MoebiusH

EXIT_OK, EXIT_INPUT, EXIT_RESIDUAL = 0, 1, 2


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    input: Optional[str] = None
    inline: Optional[str] = None
    space: str = "H"
    eps_cls: float = EPS_CLS
    eps_c: float = 1e-2
    residual_tol: float = 1e-9
    samples: int = 100
    seed: int = 0
    output: str = "json"

    def __post_init__(self):
        for name in ("eps_cls", "eps_c", "residual_tol"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be positive")
        if self.samples < 1:
            raise InputError("samples must be positive")
        if self.space not in ("H", "D"):
            raise InputError("space must be H or D")
        if self.output == "csv" and self.subcommand != "estimate":
            raise InputError("csv output is only available for estimate")

    def load(self):
        if self.inline is not None:
            text = self.inline
        elif self.input == "-":
            text = sys.stdin.read()
        elif self.input is not None:
            with open(self.input) as fh:
                text = fh.read()
        else:
            raise InputError("no input: pass --input PATH or --json TEXT")
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from exc


_CAY = np.array([[1, -1j], [1, 1j]])
_CAY_INV = np.array([[1j, 1j], [-1, 1]])


def disc_auto_to_h(obj):
    """Conjugate a disc automorphism (complex coefficients) to a real automorphism of H."""
    m = np.array([[complex_from_json(obj["a"]), complex_from_json(obj["b"])],
                  [complex_from_json(obj["c"]), complex_from_json(obj["d"])]])
    h = _CAY_INV @ m @ _CAY
    big = h.flat[np.argmax(np.abs(h))]
    h = h / (big / abs(big))
    if np.max(np.abs(h.imag)) > 1e-9 * np.max(np.abs(h)):
        raise InputError("coefficients do not define an automorphism of the disc")
    try:
        return MoebiusH.from_matrix(h.real)
    except ValueError as exc:
        raise InputError(f"coefficients do not define an automorphism of the disc: {exc}") from exc


def load_auto(obj, space="H"):
    if "tau" in obj and "gammas" not in obj:
        obj = obj["tau"]
    space = obj.get("space", space)
    try:
        if space == "D":
            perm = [int(p) - 1 for p in obj["perm"]]
            gammas = tuple(disc_auto_to_h(g) for g in obj["gammas"])
            return polyauto.PolydiscAuto(tuple(perm), gammas)
        return polyauto.PolydiscAuto.from_dict(obj)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed automorphism: {exc!r}") from exc


def load_point(v, space):
    if isinstance(v, list) and v and isinstance(v[0], (int, float)):
        v = [v]
    coords = [complex_from_json(c) for c in v]
    if space == "D":
        coords = [geometry.as_disc_point(c) for c in coords]
        coords = [cayley_inv(c) for c in coords]
    return geometry.as_polypoint(coords)


def load_map(obj, space):
    if "gammas" in obj:
        return load_auto(obj, space)
    if "maps" in obj:
        obj = dict(obj)
        obj.setdefault("space", space)
        return dynamics.LftProductMap.from_dict(obj)
    raise InputError("map spec needs 'gammas' (automorphism) or 'maps' (LFT product)")


def _ext_json(obj):
    """Replace non-finite floats by strings so the output stays strict JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _ext_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_ext_json(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return _ext_json(obj.item())
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _pretty(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _is_flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(_pretty(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _is_flat(v):
                lines.append(f"{pad}-")
                lines.append(_pretty(v, indent + 1))
            else:
                lines.append(f"{pad}- {json.dumps(v)}")
    else:
        lines.append(f"{pad}{json.dumps(obj)}")
    return "\n".join(lines)


def _is_flat(v):
    return isinstance(v, list) and all(isinstance(x, (int, float, str)) for x in v)


def emit(obj, fmt, out=None):
    out = out or sys.stdout
    obj = _ext_json(obj)
    if fmt == "pretty":
        out.write(_pretty(obj) + "\n")
    else:
        out.write(json.dumps(obj, indent=2) + "\n")


def cmd_classify(cfg, args):
    tau = load_auto(cfg.load(), cfg.space)
    return polyauto.classify_auto(tau, cfg.eps_cls).to_dict(), EXIT_OK


def cmd_cycles(cfg, args):
    tau = load_auto(cfg.load(), cfg.space)
    return polyauto.cycle_decompose(tau).to_dict(), EXIT_OK


def cmd_normalform(cfg, args):
    tau = load_auto(cfg.load(), cfg.space)
    anf = normalform.normal_form_auto(tau, cfg.eps_cls)
    out = anf.to_dict()
    worst = 0.0
    for entry, blk, nf in zip(out["cycles"], anf.decomposition.blocks, anf.per_cycle):
        r = normalform.verify_conjugacy(nf, blk.cycle, cfg.samples, cfg.seed)
        entry["residual"] = r
        worst = max(worst, r)
    out["residual"] = worst
    return out, EXIT_OK if worst <= cfg.residual_tol else EXIT_RESIDUAL


def cmd_valiron(cfg, args):
    tau = load_auto(cfg.load(), cfg.space)
    V = funceq.valiron_for_auto(tau, cfg.eps_cls)
    report = funceq.verify_valiron(V, tau, V.lam, cfg.samples, cfg.seed, m=args.m)
    out = {"function": V.to_dict(), "verification": report,
           "conditions": funceq.check_valiron_conditions(V, tau, cfg.samples, cfg.seed, cfg.eps_cls)}
    return out, EXIT_OK if report["residual"] <= cfg.residual_tol else EXIT_RESIDUAL


def cmd_abel(cfg, args):
    tau = load_auto(cfg.load(), cfg.space)
    A = funceq.abel_for_auto(tau, cfg.eps_cls)
    report = funceq.verify_abel(A, tau, A.alpha, cfg.samples, cfg.seed)
    out = {"function": A.to_dict(), "verification": report}
    return out, EXIT_OK if report["residual"] <= cfg.residual_tol else EXIT_RESIDUAL


def cmd_distance(cfg, args):
    obj = cfg.load()
    space = obj.get("space", cfg.space)
    try:
        pairs = obj["pairs"]
    except (KeyError, TypeError) as exc:
        raise InputError("distance input needs a 'pairs' list") from exc
    dists = []
    for p, w in pairs:
        z1, z2 = load_point(p, space), load_point(w, space)
        if z1.size != z2.size:
            raise InputError("points in a pair must have the same dimension")
        dists.append(geometry.dist_poly(z1, z2))
    return {"distances": dists}, EXIT_OK


def _builtin(args):
    if args.map == "intro":
        theta = dynamics.parse_angle(args.lambda_arg)
        return dynamics.builtin_intro_example(dynamics.lambda_from_angle(theta))
    if args.map == "remark5":
        return dynamics.builtin_remark5_example(args.alpha)
    raise InputError(f"unknown built-in map {args.map!r}")


def cmd_estimate(cfg, args):
    if args.map is not None:
        f = _builtin(args)
        name = args.map
    else:
        f = dynamics.as_selfmap(load_map(cfg.load(), cfg.space))
        name = f.description
    points = [None] if not args.x else [load_point(json.loads(x), cfg.space) for x in args.x]
    runs = []
    for x in points:
        stats = dynamics.estimate_step(f, x, args.m)
        cls = dynamics.classify_selfmap(f, m=args.m, eps_c=cfg.eps_c, stats=stats)
        runs.append((stats, cls))
    if cfg.output == "csv":
        rows = ["run,n,dist_to_start,step"]
        for i, (stats, _) in enumerate(runs):
            for n in range(stats.m + 1):
                rows.append(f"{i},{n},{float(stats.dist_to_start[n])!r},{float(stats.step_seq[n])!r}")
        return "\n".join(rows) + "\n", EXIT_OK
    out = {"map": name, "runs": []}
    for stats, cls in runs:
        entry = stats.to_dict(sequences=not args.no_sequences)
        entry["classification"] = cls.to_dict()
        out["runs"].append(entry)
    if len(runs) == 1:
        out["classification"] = runs[0][1].kind
        out["c_estimate"] = runs[0][0].c_estimate
    return out, EXIT_OK


def _component_map(obj, space):
    """ell(z)_i = (a z_s + b)/(c z_s + d) with s = coords[i]; coefficients complex."""
    coords = [int(c) - 1 for c in obj["coords"]]
    maps = obj.get("maps")
    if maps is None:
        coeffs = [(1, 0, 0, 1)] * len(coords)
    else:
        coeffs = [tuple(complex_from_json(m[k]) for k in "abcd") for m in maps]
    if space == "D":
        coeffs = [tuple(dynamics.LftProductMap.from_disc([0], [cf]).coeffs[0]) for cf in coeffs]

    def ell(z):
        return [(a * z[s] + b) / (c * z[s] + d) for s, (a, b, c, d) in zip(coords, coeffs)]

    return ell, len(coords)


def cmd_verify(cfg, args):
    obj = cfg.load()
    what = args.what
    if what == "semimodel":
        try:
            f = load_map(obj["f"], cfg.space)
            tau = load_auto(obj["tau"], cfg.space)
            ell, dim = _component_map(obj["ell"], obj["ell"].get("space", cfg.space))
        except (KeyError, TypeError) as exc:
            raise InputError(f"semimodel input needs 'f', 'ell' and 'tau': {exc!r}") from exc
        sm = funceq.SemiModelTriple(dim, ell, tau)
        report = funceq.verify_semimodel(sm, f, cfg.samples, cfg.seed)
    else:
        tau = load_auto(obj, cfg.space)
        f = load_map(obj["f"], cfg.space) if isinstance(obj, dict) and "f" in obj else tau
        if what == "valiron":
            fn = (funceq.ValironFunction.from_dict(obj["function"]) if "function" in obj
                  else funceq.valiron_for_auto(tau, cfg.eps_cls))
            mu = float(obj.get("mu", fn.lam))
            report = funceq.verify_valiron(fn, f, mu, cfg.samples, cfg.seed, m=args.m)
        else:
            fn = (funceq.AbelFunction.from_dict(obj["function"]) if "function" in obj
                  else funceq.abel_for_auto(tau, cfg.eps_cls))
            alpha = int(obj.get("alpha", fn.alpha))
            report = funceq.verify_abel(fn, f, alpha, cfg.samples, cfg.seed)
    code = EXIT_OK if report["residual"] <= cfg.residual_tol else EXIT_RESIDUAL
    return report, code


COMMANDS = {
    "classify": cmd_classify,
    "cycles": cmd_cycles,
    "normalform": cmd_normalform,
    "valiron": cmd_valiron,
    "abel": cmd_abel,
    "distance": cmd_distance,
    "estimate": cmd_estimate,
    "verify": cmd_verify,
}


class _Parser(argparse.ArgumentParser):
    """Usage errors are malformed input, so they exit with EXIT_INPUT rather than 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--input", "-i", help="JSON input file ('-' for stdin)")
    common.add_argument("--json", dest="inline", help="inline JSON input")
    common.add_argument("--space", choices=("H", "D"), default="H",
                        help="coordinates of the input (D is converted by the Cayley transform)")
    common.add_argument("--eps-cls", type=float, default=EPS_CLS)
    common.add_argument("--eps-c", type=float, default=1e-2)
    common.add_argument("--residual-tol", type=float, default=1e-9)
    common.add_argument("--samples", type=int, default=100)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", dest="output", choices=("json", "csv", "pretty"), default="json")

    parser = _Parser(prog="polydyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name in ("classify", "cycles", "normalform", "abel", "distance"):
        sub.add_parser(name, parents=[common])
    p = sub.add_parser("valiron", parents=[common])
    p.add_argument("--m", type=int, default=2000, help="horizon of the divergence-rate check")
    p = sub.add_parser("estimate", parents=[common])
    p.add_argument("--map", choices=("intro", "remark5"))
    p.add_argument("--lambda-arg", default="0.5pi", help="argument of lambda for --map intro")
    p.add_argument("--alpha", type=float, default=0.3, help="alpha for --map remark5")
    p.add_argument("--m", type=int, default=10000)
    p.add_argument("--x", action="append", help="base point as JSON list of [re, im]; repeatable")
    p.add_argument("--no-sequences", action="store_true")
    p = sub.add_parser("verify", parents=[common])
    p.add_argument("what", choices=("valiron", "abel", "semimodel"))
    p.add_argument("--m", type=int, default=2000)
    return parser


def run(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.subcommand, args.input, args.inline, args.space, args.eps_cls,
                        args.eps_c, args.residual_tol, args.samples, args.seed, args.output)
        result, code = COMMANDS[args.subcommand](cfg, args)
    except (DomainError, dynamics.OrbitOverflowError) as exc:
        err.write(f"domain violation: {exc}\n")
        return EXIT_RESIDUAL
    except (InputError, funceq.KindError, ValueError, KeyError, TypeError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    if isinstance(result, str):
        out.write(result)
    else:
        emit(result, cfg.output, out)
    if code == EXIT_RESIDUAL:
        err.write(f"residual above tolerance {cfg.residual_tol}\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
