"""Command-line front end.

Subcommands: eval (any registered function), check (one identity instance or
a seeded random sweep), sweep (alias of check --sweep), kernel (grid of kernel
values written as CSV/JSON), limits (convergence tables for the two limit
transitions).

Exit codes: 0 all pass; 1 usage or domain error; 2 residual/threshold failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import re
import sys

from .errors import QFunctionError
from .hyperq import phi11, phi11_shifted, phi11_weighted
from .identities import (DEFAULT_TOL, IdentityId, check_identity, kernel_table,
                         parse_identity, run_limit_check)
from .qcore import (QBase, TruncationPolicy, qpochhammer_ex, INFINITY)
from .qspecial import (affine_q_krawtchouk, affine_q_krawtchouk_int,
                       bessel_j_qexp, big_q_bessel, c_addition, c_norm,
                       krawtchouk_hat, little_q_bessel_J, little_q_bessel_j,
                       little_q_jacobi, little_q_jacobi_std, r_poly)


class _Parser(argparse.ArgumentParser):
    def __init__(self, *a, **kw):
        kw.setdefault("allow_abbrev", False)
        super().__init__(*a, **kw)

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _fmt_complex(v) -> str:
    c = complex(v)
    if c.imag == 0:
        return repr(c.real)
    return repr(c)


# ----------------------------------------------------------- eval registry
#
# name -> (param names with converters, wrapper returning
#          (value, terms_used, tail_bound))

def _conv_int(s):
    return int(s)


def _conv_float(s):
    return float(s)


def _conv_index(s):
    if s.lower() in ("inf", "infinity"):
        return INFINITY
    return int(s)


def _eval_registry(q, policy):
    def jres(f):
        return f.value, f.terms_used, f.tail_bound

    def j_series(alpha, z):
        little_q_bessel_j(alpha, 0.0, q, policy)  # domain validation
        return jres(phi11(0.0, q ** (alpha + 1), q, z, policy))

    return {
        "qpochhammer": (
            {"a": _conv_float, "n": _conv_index},
            lambda p: qpochhammer_ex(p["a"], q, p["n"], policy)),
        "phi11": (
            {"a": _conv_float, "b": _conv_float, "z": _conv_float},
            lambda p: jres(phi11(p["a"], p["b"], q, p["z"], policy))),
        "phi11_weighted": (
            {"a": _conv_float, "b_exp": _conv_float, "z": _conv_float},
            lambda p: jres(phi11_weighted(p["a"], p["b_exp"], p["z"], q, policy))),
        "phi11_shifted": (
            {"n": _conv_int, "a": _conv_float, "z": _conv_float},
            lambda p: (phi11_shifted(p["n"], p["a"], p["z"], q, policy), 0, 0.0)),
        "little_q_bessel_j": (
            {"alpha": _conv_float, "z": _conv_float},
            lambda p: j_series(p["alpha"], p["z"])),
        "little_q_bessel_J": (
            {"alpha": _conv_float, "z": _conv_float},
            lambda p: (little_q_bessel_J(p["alpha"], p["z"], q, policy), 0, 0.0)),
        "bessel_j_qexp": (
            {"alpha": _conv_float, "e": _conv_int},
            lambda p: (bessel_j_qexp(p["alpha"], p["e"], q, policy), 0, 0.0)),
        "little_q_jacobi": (
            {"n": _conv_int, "x": _conv_float, "a_exp": _conv_float,
             "b_exp": _conv_float},
            lambda p: (little_q_jacobi(p["n"], p["x"], p["a_exp"], p["b_exp"], q),
                       p["n"] + 1, 0.0)),
        "little_q_jacobi_std": (
            {"n": _conv_int, "x": _conv_float, "a_exp": _conv_float,
             "b_exp": _conv_float},
            lambda p: (little_q_jacobi_std(p["n"], p["x"], p["a_exp"],
                                           p["b_exp"], q), p["n"] + 1, 0.0)),
        "affine_q_krawtchouk": (
            {"z": _conv_int, "x_arg": _conv_float, "t": _conv_float,
             "N": _conv_int},
            lambda p: (affine_q_krawtchouk(p["z"], p["x_arg"], p["t"], p["N"],
                                           q, policy), p["z"] + 1, 0.0)),
        "affine_q_krawtchouk_int": (
            {"z": _conv_int, "x": _conv_int, "t": _conv_float, "N": _conv_int},
            lambda p: (affine_q_krawtchouk_int(p["z"], p["x"], p["t"], p["N"],
                                               q, policy), 0, 0.0)),
        "krawtchouk_hat": (
            {"z": _conv_int, "x": _conv_int, "t": _conv_float, "N": _conv_int},
            lambda p: (krawtchouk_hat(p["z"], p["x"], p["t"], p["N"], q, policy),
                       0, 0.0)),
        "big_q_bessel": (
            {"lam": _conv_float, "x": _conv_float, "a": _conv_float},
            lambda p: (big_q_bessel(p["lam"], p["x"], p["a"], q, policy), 0, 0.0)),
        "r_poly": (
            {"l": _conv_int, "m": _conv_int, "nu": _conv_float, "x": _conv_float},
            lambda p: (r_poly(p["l"], p["m"], p["nu"], p["x"], q), 0, 0.0)),
        "c_norm": (
            {"l": _conv_int, "m": _conv_int, "nu": _conv_float},
            lambda p: (c_norm(p["l"], p["m"], p["nu"], q), 0, 0.0)),
        "c_addition": (
            {"l": _conv_int, "r": _conv_int, "s": _conv_int, "nu": _conv_float},
            lambda p: (c_addition(p["l"], p["r"], p["s"], p["nu"], q), 0, 0.0)),
    }


# --------------------------------------------------------- sweep samplers

def _sweep_params(id_: IdentityId, rng: random.Random, q: float) -> dict:
    def disc(radius):
        while True:
            re = rng.uniform(-radius, radius)
            im = rng.uniform(-radius, radius)
            if re * re + im * im <= radius * radius:
                return complex(re, im)

    if id_ is IdentityId.PROP21:
        n = rng.randint(-6, 6)
        z = disc(0.9)
        while n < 0 and abs(z) < 0.05:
            z = disc(0.9)
        return {"n": n, "a": disc(0.9), "z": z}
    if id_ is IdentityId.TRANSFORM27:
        w = disc(0.85)
        while abs(w) < 0.05:
            w = disc(0.85)
        return {"a": disc(0.9), "w": w, "z": disc(0.85)}
    if id_ is IdentityId.JACOBI_ORTH:
        return {"m": rng.randint(0, 5), "n": rng.randint(0, 5),
                "alpha": rng.uniform(-0.5, 2.5), "beta": rng.uniform(-0.5, 2.5)}
    if id_ is IdentityId.KRAWTCHOUK_ORTH:
        N = rng.randint(1, 8)
        return {"n": rng.randint(0, N), "m": rng.randint(0, N),
                "t": rng.uniform(0.05, 0.95) / q, "N": N}
    if id_ is IdentityId.FLORIS_KOELINK_ADDITION:
        l, m = rng.randint(0, 3), rng.randint(0, 3)
        N = rng.randint(l, 6)
        return {"l": l, "m": m, "z": rng.randint(0, N - l), "N": N,
                "x": rng.randint(max(0, l - m), N),
                "nu": rng.uniform(0.3, 2.5), "t": rng.uniform(0.1, 0.95) / q}
    if id_ is IdentityId.JACOBI_ADDITION:
        l = rng.randint(0, 3)
        N = rng.randint(l, 6)
        return {"l": l, "z": rng.randint(0, N - l), "N": N,
                "x": rng.randint(0, N),
                "nu": rng.uniform(0.3, 2.5), "t": rng.uniform(0.1, 0.95) / q}
    if id_ is IdentityId.COROLLARY43:
        return {"nu": rng.uniform(0.3, 2.5), "t": rng.uniform(0.1, 0.95) / q,
                "x": rng.randint(0, 2), "z": rng.randint(0, 1),
                "N": rng.randint(3, 4)}
    if id_ is IdentityId.BOUND24:
        return {"alpha": rng.uniform(0.05, 3.0), "n": rng.randint(0, 30)}
    if id_ is IdentityId.BOUND25:
        return {"m": rng.randint(0, 10), "n": rng.randint(0, 10)}
    if id_ is IdentityId.BOUND_LEMMA42:
        N = rng.randint(0, 8)
        r = rng.randint(0, 6)
        return {"nu": rng.uniform(0.1, 3.0), "N": N, "z": rng.randint(0, N),
                "r": r, "s": rng.randint(0, r)}
    if id_ is IdentityId.BOUND_PROP32:
        N = rng.randint(1, 7)
        return {"z": rng.randint(0, N), "N": N,
                "t": rng.uniform(0.05, 0.95) / q,
                "x_re": rng.uniform(-1.0, 5.0), "x_im": rng.uniform(-2.0, 2.0)}
    if id_ is IdentityId.KERNEL_SYMMETRY:
        return {"nu": rng.uniform(0.2, 3.0), "x": rng.randint(0, 4),
                "y": rng.randint(0, 4), "z": rng.randint(0, 4)}
    if id_ is IdentityId.KERNEL_POSITIVITY:
        return {"nu": rng.uniform(0.2, 3.0), "x": rng.randint(0, 4),
                "y": rng.randint(0, 4), "z": rng.randint(-4, 10)}
    if id_ is IdentityId.PRODUCT_FORMULA52:
        return {"nu": rng.uniform(1.2, 3.0), "x": rng.randint(0, 3),
                "y": rng.randint(0, 3), "z_lo": -8, "z_hi": 14}
    raise QFunctionError(f"identity {id_.value} has no sweep sampler")


# ------------------------------------------------------------------ output

def _emit_reports(reports, fmt, out_path):
    if fmt == "json":
        text = json.dumps([r.to_json_dict() for r in reports],
                          indent=2, sort_keys=True)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["identity", "params", "lhs_re", "lhs_im", "rhs_re",
                         "rhs_im", "abs_residual", "rel_residual",
                         "tail_budget", "pass"])
        for r in reports:
            d = r.to_json_dict()
            writer.writerow([d["identity"],
                             json.dumps(d["params"], sort_keys=True),
                             repr(d["lhs"][0]), repr(d["lhs"][1]),
                             repr(d["rhs"][0]), repr(d["rhs"][1]),
                             repr(d["abs_residual"]), repr(d["rel_residual"]),
                             repr(d["tail_budget"]), d["pass"]])
        text = buf.getvalue()
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        print(text)


def _add_globals(sp):
    sp.add_argument("--q", type=float, required=True)
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sp.add_argument("--eps-term", type=float, default=1e-17)
    sp.add_argument("--eps-tail", type=float, default=1e-12)
    sp.add_argument("--max-terms", type=int, default=10000)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out", default=None)
    sp.add_argument("--seed", type=int, default=0)


def _policy(args) -> TruncationPolicy:
    return TruncationPolicy(eps_term=args.eps_term, eps_tail=args.eps_tail,
                            max_terms=args.max_terms)


def _parse_kv(pairs):
    """--key value pairs from the remainder of the argv."""
    if len(pairs) % 2 != 0:
        raise SystemExit(_usage_error("parameters must come as --key value pairs"))
    out = {}
    for i in range(0, len(pairs), 2):
        key = pairs[i]
        if not key.startswith("--"):
            raise SystemExit(_usage_error(f"expected --key, got {key!r}"))
        out[key[2:].replace("-", "_")] = pairs[i + 1]
    return out


def _usage_error(msg):
    print(f"error: {msg}", file=sys.stderr)
    return 1


def _parse_range(s):
    lo, _, hi = s.partition(":")
    try:
        lo_i, hi_i = int(lo), int(hi if hi else lo)
    except ValueError:
        raise SystemExit(_usage_error(f"bad range {s!r}, expected lo:hi"))
    if lo_i > hi_i:
        raise SystemExit(_usage_error(f"bad range {s!r}: lo > hi"))
    return lo_i, hi_i


_RANGE_TOKEN = re.compile(r"^-?\d+:-?\d+$|^-\d+$")


def _merge_leading_dash_values(argv):
    """Join '--flag' '-4:8' pairs so argparse does not read the value as a flag."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _RANGE_TOKEN.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = _Parser(prog="qbessel",
                     description="q-special functions and identity checks")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_eval = sub.add_parser("eval", help="evaluate a registered function")
    p_eval.add_argument("function")
    _add_globals(p_eval)

    for name in ("check", "sweep"):
        p_chk = sub.add_parser(name, help="check one identity or sweep it")
        p_chk.add_argument("identity")
        p_chk.add_argument("--sweep", type=int, default=0)
        _add_globals(p_chk)

    p_ker = sub.add_parser("kernel", help="kernel table over integer ranges")
    p_ker.add_argument("--nu", type=float, required=True)
    p_ker.add_argument("--x", required=True)
    p_ker.add_argument("--y", required=True)
    p_ker.add_argument("--z", required=True)
    _add_globals(p_ker)

    p_lim = sub.add_parser("limits", help="limit-transition residual table")
    p_lim.add_argument("prop", help="prop31 or prop32")
    p_lim.add_argument("--indices", default="5,10,15,20,25")
    _add_globals(p_lim)

    if argv is None:
        argv = sys.argv[1:]
    argv = _merge_leading_dash_values(list(argv))
    try:
        args, rest = parser.parse_known_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        QBase(args.q)
    except QFunctionError as exc:
        return _usage_error(str(exc))
    policy = _policy(args)

    try:
        if args.cmd == "eval":
            return _cmd_eval(args, rest, policy)
        if args.cmd in ("check", "sweep"):
            return _cmd_check(args, rest, policy)
        if args.cmd == "kernel":
            if rest:
                return _usage_error(f"unrecognized arguments: {rest}")
            return _cmd_kernel(args, policy)
        if args.cmd == "limits":
            return _cmd_limits(args, rest, policy)
    except QFunctionError as exc:
        return _usage_error(str(exc))
    except SystemExit as exc:
        return int(exc.code or 0)
    return _usage_error(f"unknown command {args.cmd!r}")


def _cmd_eval(args, rest, policy) -> int:
    registry = _eval_registry(args.q, policy)
    if args.function not in registry:
        return _usage_error(f"unknown function {args.function!r}; "
                            f"known: {', '.join(sorted(registry))}")
    converters, fn = registry[args.function]
    raw = _parse_kv(rest)
    missing = sorted(set(converters) - set(raw))
    if missing:
        return _usage_error(
            f"missing parameters for {args.function}: {', '.join(missing)}")
    extra = sorted(set(raw) - set(converters))
    if extra:
        return _usage_error(f"unknown parameters: {', '.join(extra)}")
    params = {}
    for key, conv in converters.items():
        try:
            params[key] = conv(raw[key])
        except ValueError:
            return _usage_error(f"bad value for --{key}: {raw[key]!r}")
    value, terms, tail = fn(params)
    print(f"value = {_fmt_complex(value)}")
    print(f"terms_used = {terms}")
    print(f"tail_bound = {repr(float(tail))}")
    return 0


def _cmd_check(args, rest, policy) -> int:
    id_ = parse_identity(args.identity)
    if args.cmd == "sweep" and not args.sweep:
        return _usage_error("sweep requires --sweep N")
    reports = []
    if args.sweep:
        rng = random.Random(args.seed)
        for _ in range(args.sweep):
            params = _sweep_params(id_, rng, args.q)
            params["q"] = args.q
            reports.append(check_identity(id_, params, policy, args.tol))
    else:
        raw = _parse_kv(rest)
        params = {}
        for key, val in raw.items():
            try:
                params[key] = int(val)
            except ValueError:
                try:
                    params[key] = float(val)
                except ValueError:
                    return _usage_error(f"bad numeric value for --{key}: {val!r}")
        params["q"] = args.q
        try:
            reports.append(check_identity(id_, params, policy, args.tol))
        except KeyError as exc:
            return _usage_error(f"missing parameter {exc} for {id_.value}")
    _emit_reports(reports, args.format, args.out)
    return 0 if all(r.passed for r in reports) else 2


def _cmd_kernel(args, policy) -> int:
    x_rng = _parse_range(args.x)
    y_rng = _parse_range(args.y)
    z_rng = _parse_range(args.z)
    table = kernel_table(args.nu, x_rng, y_rng, z_rng, args.q, policy)
    if args.format == "json":
        text = json.dumps(table.to_json_dict(), indent=2, sort_keys=True)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "y", "z", "delta", "sym_residual"])
        for (x, y, z, d, s) in table.grid:
            writer.writerow([x, y, z, repr(d), repr(s)])
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text)
    print(f"min_value = {repr(table.min_value)}  "
          f"symmetry_residual_max = {repr(table.symmetry_residual_max)}")
    ok = table.min_value >= -1e-12 and table.symmetry_residual_max <= args.tol
    return 0 if ok else 2


def _cmd_limits(args, rest, policy) -> int:
    name = args.prop.strip().lower()
    if name not in ("prop31", "prop32"):
        return _usage_error(f"unknown limit transition {args.prop!r}")
    id_ = parse_identity(name)
    raw = _parse_kv(rest)
    params = {}
    for key, val in raw.items():
        try:
            params[key] = float(val) if "." in val or "e" in val.lower() else int(val)
        except ValueError:
            return _usage_error(f"bad numeric value for --{key}: {val!r}")
    params["q"] = args.q
    try:
        indices = [int(s) for s in args.indices.split(",") if s]
    except ValueError:
        return _usage_error(f"bad indices list {args.indices!r}")
    try:
        rep = run_limit_check(id_, params, indices, policy)
    except KeyError as exc:
        return _usage_error(f"missing parameter {exc} for {name}")
    if args.format == "json":
        text = json.dumps(rep.to_json_dict(), indent=2, sort_keys=True)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "residual"])
        for i, r in zip(rep.index_values, rep.residuals):
            writer.writerow([i, repr(r)])
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text)
    ok = rep.monotone_tail and rep.residuals[-1] < args.tol
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
