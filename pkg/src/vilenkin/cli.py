"""vilenkin command line.

Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 backend boundary.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import scalars as S
from .catalog import EXAMPLES, KNOWN_DISCREPANCIES, REFERENCE, example, example2_closed_form
from .group import parse_fraction
from .haar import haar_analyze, modified_gibbs
from .scalars import EXACT, FLOAT, BackendError
from .signals import Atom, Grid, StepFunction, step_from_atoms
from .uncertainty import GNORM, LAMBDA, METRICS, up
from .vct import fourier_step, require_exact_ok, vct_forward, vct_inverse

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_BACKEND = 0, 1, 2, 3
BENCH_LIMIT = 2**26
EXAMPLE2_RTOL = 1e-12

ATOM_KEYS = {"coeff", "scale", "translate", "modulate"}
ATOM_REQUIRED = {"scale", "translate"}
ATOMS_SPEC_KEYS = {"p", "atoms"}
VALUES_SPEC_KEYS = {"p", "m", "M", "values", "half"}


class UsageError(ValueError):
    pass


# ----------------------------------------------------------------------
# function-spec files
# ----------------------------------------------------------------------

def _scalar(x, what: str):
    """A fraction string, a JSON number, or a [re, im] pair of either."""
    if isinstance(x, list):
        if len(x) != 2:
            raise UsageError(f"{what}: complex values are [re, im] pairs")
        re, im = (_scalar(v, what) for v in x)
        if isinstance(re, float) or isinstance(im, float):
            return complex(float(re), float(im))
        return S.CRational(re, im)
    if isinstance(x, bool):
        raise UsageError(f"{what}: expected a number, got {x!r}")
    if isinstance(x, str):
        try:
            return parse_fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"{what}: {exc}") from None
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return x
    raise UsageError(f"{what}: expected a number, got {x!r}")


def _int(x, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise UsageError(f"{what} must be an integer")
    return x


def _check_keys(obj, allowed, required, what):
    if not isinstance(obj, dict):
        raise UsageError(f"{what} must be a JSON object")
    unknown = set(obj) - allowed
    if unknown:
        raise UsageError(f"unknown key(s) in {what}: {', '.join(sorted(unknown))}")
    missing = required - set(obj)
    if missing:
        raise UsageError(f"missing key(s) in {what}: {', '.join(sorted(missing))}")


def parse_function_spec(obj, backend: str = EXACT) -> StepFunction:
    if not isinstance(obj, dict):
        raise UsageError("function spec must be a JSON object")
    if "atoms" in obj:
        _check_keys(obj, ATOMS_SPEC_KEYS, ATOMS_SPEC_KEYS, "function spec")
        p = _int(obj["p"], "p")
        if p < 2:
            raise UsageError("p must be at least 2")
        if not isinstance(obj["atoms"], list) or not obj["atoms"]:
            raise UsageError("atoms must be a nonempty list")
        atoms = []
        for i, a in enumerate(obj["atoms"]):
            _check_keys(a, ATOM_KEYS, ATOM_REQUIRED, f"atom {i}")
            coeff = _scalar(a.get("coeff", "1"), f"atom {i} coeff")
            t = _scalar(a["translate"], f"atom {i} translate")
            mo = _scalar(a.get("modulate", "0"), f"atom {i} modulate")
            if not isinstance(t, Fraction) or not isinstance(mo, Fraction):
                raise UsageError(f"atom {i}: translate and modulate must be fraction strings")
            try:
                atoms.append(Atom.ball(p, _int(a["scale"], f"atom {i} scale"), t, mo, coeff))
            except ValueError as exc:
                raise UsageError(f"atom {i}: {exc}") from None
        if backend == FLOAT or any(isinstance(a.coeff, (float, complex)) for a in atoms):
            if backend == EXACT:
                raise UsageError("float coefficients need --backend f64")
            return step_from_atoms(atoms, FLOAT)
        return step_from_atoms(atoms, EXACT)
    _check_keys(obj, VALUES_SPEC_KEYS, {"p", "m", "M", "values"}, "function spec")
    p, m, M = (_int(obj[k], k) for k in ("p", "m", "M"))
    if p < 2:
        raise UsageError("p must be at least 2")
    if m + M < 0:
        raise UsageError("need m + M >= 0")
    grid = Grid(p, m, M)
    raw = obj["values"]
    if not isinstance(raw, list) or len(raw) != grid.size:
        raise UsageError(f"values must list {grid.size} cells for p={p}, m={m}, M={M}")
    vals = [_scalar(v, f"value {i}") for i, v in enumerate(raw)]
    half = _int(obj.get("half", 0), "half")
    has_float = any(isinstance(v, (float, complex)) for v in vals)
    if backend == EXACT and has_float:
        raise UsageError("decimal values need --backend f64")
    if backend == FLOAT or has_float:
        arr = np.array([complex(v) for v in vals], dtype=np.complex128)
    else:
        arr = S.exact_array(vals)
    return StepFunction(grid, arr, half=half)


def read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from None
    return obj


def load_function(path: str, backend: str) -> StepFunction:
    return parse_function_spec(read_json(path), backend)


def parse_vector(raw, p: int, backend: str):
    """A bare JSON array of p^n cell values."""
    if not raw:
        raise UsageError("vector must be nonempty")
    n, size = 0, 1
    while size < len(raw):
        n, size = n + 1, size * p
    if size != len(raw):
        raise UsageError(f"vector length {len(raw)} is not a power of p={p}")
    vals = [_scalar(v, f"entry {i}") for i, v in enumerate(raw)]
    has_float = any(isinstance(v, (float, complex)) for v in vals)
    if backend == EXACT and has_float:
        raise UsageError("decimal values need --backend f64")
    if backend == FLOAT or has_float:
        return np.array([complex(v) for v in vals], dtype=np.complex128), False
    require_exact_ok(p)
    return S.exact_array(vals), True


# ----------------------------------------------------------------------
# output helpers
# ----------------------------------------------------------------------


def fmt_value(v, exact: bool):
    if exact:
        c = S.CRational.coerce(v)
        return [str(c.re), str(c.im)]
    c = complex(v)
    return [c.real, c.imag]


def fmt_interval(a, b) -> str:
    return f"[{a},{b})"


def step_to_spec(f: StepFunction) -> dict:
    out = {"p": f.p, "m": f.grid.m, "M": f.grid.M,
           "values": [fmt_value(v, f.exact) for v in f.values]}
    if f.half:
        out["half"] = f.half
    return out


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def emit(args, obj, lines):
    if args.json:
        sys.stdout.write(dump_json(obj))
    else:
        for line in lines:
            print(line)


def _need_input(args) -> StepFunction:
    if not args.input:
        raise UsageError(f"{args.command} needs --input")
    f = load_function(args.input, args.backend)
    if args.p is not None and args.p != f.p:
        raise UsageError(f"--p {args.p} does not match p={f.p} in {args.input}")
    return f


def _require_transform_backend(f: StepFunction):
    if f.exact:
        require_exact_ok(f.p)


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_up(args) -> int:
    f = _need_input(args)
    _require_transform_backend(f)
    metrics = METRICS if args.metric == "both" else (args.metric,)
    reports = [up(f, m) for m in metrics]
    obj = {"p": f.p, "backend": f.backend, "reports": []}
    lines = []
    for r in reports:
        d = r.to_dict()
        obj["reports"].append(d)
        tag = "lambda" if r.metric == LAMBDA else "G"
        lines.append(f"V_{tag}(f) = {d['V_time']}  argmin {_ivs(r.argmin_time, f.exact)}")
        lines.append(f"V_{tag}(Ff) = {d['V_freq']}  argmin {_ivs(r.argmin_freq, f.exact)}")
        lines.append(f"UP_{tag}(f) = {d['UP']}")
    emit(args, obj, lines)
    return EXIT_OK


def _ivs(lst, exact: bool) -> str:
    if exact:
        return " u ".join(fmt_interval(a, b) for a, b in lst)
    return " u ".join(fmt_interval(float(a), float(b)) for a, b in lst)


def cmd_vct(args) -> int:
    if not args.input:
        raise UsageError("vct needs --input")
    raw = read_json(args.input)
    if isinstance(raw, list):
        # bare vector in, bare vector out
        if args.p is None:
            raise UsageError("a bare vector input needs --p")
        x, exact = parse_vector(raw, args.p, args.backend)
        p = args.p
    else:
        f = parse_function_spec(raw, args.backend)
        if args.p is not None and args.p != f.p:
            raise UsageError(f"--p {args.p} does not match p={f.p} in {args.input}")
        _require_transform_backend(f)
        if f.half:
            raise UsageError("vct needs plain cell values (no half-power factor)")
        x, exact, p = f.values, f.exact, f.p
    y = vct_inverse(x, p) if args.inverse else vct_forward(x, p).entries
    out = [fmt_value(v, exact) for v in y]
    if isinstance(raw, list):
        obj = out
    else:
        obj = {"p": p, "n": f.grid.n, "backend": f.backend, "inverse": args.inverse, "entries": out}
    emit(args, obj, [f"{k}: {_show(v)}" for k, v in enumerate(out)])
    return EXIT_OK


def _show(pair) -> str:
    re, im = pair
    return f"{re} {im}i" if str(im).startswith("-") else f"{re} +{im}i"


def cmd_haar(args) -> int:
    f = _need_input(args)
    if f.exact:
        require_exact_ok(f.p)
    e = haar_analyze(f)
    exact = e.backend == EXACT
    rows = []
    for (nu, j, k), v in sorted(e.details.items()):
        rows.append({"nu": nu, "j": j, "k": k, "value": fmt_value(v, exact)})
    obj = {"p": e.p, "backend": e.backend, "half": e.half, "j_min": e.j_min,
           "mean": fmt_value(e.mean, exact), "details": rows}
    # values are the reduced coefficients p^(-j/2) c (times p^(half/2) when half != 0)
    lines = ["nu,j,k,re,im"]
    lines += [",".join(str(x) for x in (r["nu"], r["j"], r["k"], *r["value"])) for r in rows]
    mre, mim = fmt_value(e.mean, exact)
    lines.append(f"TAIL {e.j_min} {mre} {mim}")
    if e.half:
        lines.append(f"HALF {e.half}")
    emit(args, obj, lines)
    return EXIT_OK


def cmd_fourier(args) -> int:
    f = _need_input(args)
    _require_transform_backend(f)
    g = fourier_step(f)
    obj = step_to_spec(g)
    emit(args, obj, _step_lines(g))
    return EXIT_OK


def cmd_deriv(args) -> int:
    f = _need_input(args)
    _require_transform_backend(f)
    g = modified_gibbs(f)
    obj = step_to_spec(g)
    emit(args, obj, _step_lines(g))
    return EXIT_OK


def _step_lines(g: StepFunction) -> list[str]:
    lines = [f"p={g.p} m={g.grid.m} M={g.grid.M} half={g.half}"]
    for k, v in enumerate(g.values):
        a, b = g.grid.cell(k)
        lines.append(f"{fmt_interval(a, b)}: {_show(fmt_value(v, g.exact))}")
    return lines


# verify-paper ---------------------------------------------------------

def _table_entries():
    """(label, computed, expected, key) for every published entry."""
    rows = []
    for name in EXAMPLES:
        f = example(name)
        lam = up(f, LAMBDA)
        g = up(f, GNORM)
        ref = REFERENCE[name]
        rows += [
            (f"V_lambda({name})", lam.V_time, ref["V_lambda"], (name, "V_lambda")),
            (f"V_lambda(F{name})", lam.V_freq, ref["V_lambda_F"], (name, "V_lambda_F")),
            (f"UP_lambda({name})", lam.UP, ref["UP_lambda"], (name, "UP_lambda")),
            (f"V_G({name})", g.V_time, ref["V_G"], (name, "V_G")),
            (f"V_G(F{name})", g.V_freq, ref["V_G_F"], (name, "V_G_F")),
            (f"UP_G({name})", g.UP, ref["UP_G"], (name, "UP_G")),
            (f"argmin_time({name})", lam.argmin_time, ref["argmin_time"], (name, "argmin_time")),
            (f"argmin_freq({name})", lam.argmin_freq, ref["argmin_freq"], (name, "argmin_freq")),
        ]
    lam_s = up(example("g2"), LAMBDA, centers="support")
    rows.append(("V_lambda(g2) [centers in supp]", lam_s.V_time, REFERENCE["g2"]["V_lambda"], None))
    rows.append(("argmin_time(g2) [centers in supp]", lam_s.argmin_time, REFERENCE["g2"]["argmin_time"], None))
    return rows


def _example2_entries():
    rows = []
    f = example("f1", 4)
    g = up(f, GNORM)
    rows.append(("V_G(f1) [p=4]", g.V_time, Fraction(1, 21), None))
    rows.append(("V_G(Ff1) [p=4]", g.V_freq, Fraction(256, 21), None))
    rows.append(("UP_G(f1) [p=4]", g.UP, Fraction(256, 441), None))
    rows.append(("UP_G(f1) [p=4] closed form", example2_closed_form(2), Fraction(256, 441), None))
    return rows


def _show_val(v) -> str:
    if isinstance(v, list):
        return " u ".join(fmt_interval(a, b) for a, b in v)
    return str(v)


def cmd_verify_paper(args) -> int:
    rows = _table_entries() + _example2_entries()
    corrupt = args.corrupt
    labels = {r[0] for r in rows} | {"UP_G(f1) [p=8]"}
    if corrupt and corrupt not in labels:
        raise UsageError(f"unknown entry for --corrupt: {corrupt}")
    results = []
    failed = 0
    for label, got, expected, key in rows:
        if label == corrupt:
            expected = expected + 1 if not isinstance(expected, list) else [(Fraction(-1), Fraction(0))]
        known = KNOWN_DISCREPANCIES.get(key) if key else None
        if got == expected:
            status, note = "PASS", ""
        elif known and label != corrupt and got == known[0] and not args.strict:
            status, note = "DIFF", f"published {_show_val(expected)}: {known[1]}"
        else:
            status, note = "FAIL", f"expected {_show_val(expected)}"
            failed += 1
        results.append({"entry": label, "value": _show_val(got), "expected": _show_val(expected),
                        "status": status, "note": note})
    # p = 8: frequency side is not a Gaussian rational cellwise
    r8 = up(example("f1", 8, backend=FLOAT), GNORM)
    closed = example2_closed_form(3)
    if corrupt == "UP_G(f1) [p=8]":
        closed += 1
    ok = abs(r8.UP - float(closed)) <= EXAMPLE2_RTOL * float(closed)
    failed += not ok
    results.append({"entry": "UP_G(f1) [p=8]", "value": repr(float(r8.UP)), "expected": str(closed),
                    "status": "PASS" if ok else "FAIL", "note": f"float, rel tol {EXAMPLE2_RTOL}"})
    lines = []
    for r in results:
        line = f"{r['entry']} = {r['value']} {r['status']}"
        if r["note"]:
            line += f" ({r['note']})"
        lines.append(line)
    obj = {"results": results, "failed": failed}
    emit(args, obj, lines)
    return EXIT_VERIFY if failed else EXIT_OK


# bench ------------------------------------------------------------------

def cmd_bench(args) -> int:
    p = args.p if args.p is not None else 2
    n_max = args.n_max
    if p < 2:
        raise UsageError("p must be at least 2")
    if n_max < 0:
        raise UsageError("--n-max must be nonnegative")
    if n_max and p**n_max > BENCH_LIMIT:
        raise UsageError(f"p^n_max = {p}^{n_max} exceeds the {BENCH_LIMIT}-entry limit")
    rng = np.random.default_rng(args.seed)
    print("p,n,kernel,nanos")
    for n in range(1, n_max + 1):
        N = p**n
        x = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        timings = {}
        outs = {}
        for kernel in ("naive", "fast"):
            t0 = time.perf_counter_ns()
            outs[kernel] = vct_forward(x, p, kernel=kernel).entries
            timings[kernel] = time.perf_counter_ns() - t0
        scale = max(float(np.max(np.abs(outs["naive"]))), 1.0)
        err = float(np.max(np.abs(outs["naive"] - outs["fast"]))) / scale
        if err > 1e-12:
            print(f"kernel mismatch at p={p}, n={n}: rel. error {err:.3g}", file=sys.stderr)
            return EXIT_VERIFY
        for kernel in ("naive", "fast"):
            print(f"{p},{n},{kernel},{timings[kernel]}")
    return EXIT_OK


# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=None, help="group parameter")
    common.add_argument("--backend", choices=(EXACT, FLOAT), default=EXACT)
    common.add_argument("--metric", choices=(LAMBDA, GNORM, "both"), default="both")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--input", metavar="PATH", help="function-spec JSON file")

    parser = argparse.ArgumentParser(prog="vilenkin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("up", parents=[common], help="variances and uncertainty products")
    vp_vct = sub.add_parser("vct", parents=[common], help="discrete VCT of the cell values")
    vp_vct.add_argument("--inverse", action="store_true", help="apply the inverse transform")
    sub.add_parser("haar", parents=[common], help="Haar coefficients")
    sub.add_parser("deriv", parents=[common], help="modified Gibbs derivative")
    sub.add_parser("fourier", parents=[common], help="Fourier transform as a step function")
    vp = sub.add_parser("verify-paper", parents=[common], help="recompute the reference tables")
    vp.add_argument("--strict", action="store_true", help="count known discrepancies as failures")
    vp.add_argument("--corrupt", metavar="ENTRY", help=argparse.SUPPRESS)
    bp = sub.add_parser("bench", parents=[common], help="time naive vs fast VCT (CSV)")
    bp.add_argument("--n-max", type=int, default=10)
    bp.add_argument("--seed", type=int, default=0)
    return parser


COMMANDS = {
    "up": cmd_up,
    "vct": cmd_vct,
    "haar": cmd_haar,
    "deriv": cmd_deriv,
    "fourier": cmd_fourier,
    "verify-paper": cmd_verify_paper,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except BackendError as exc:
        print(f"vilenkin: backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (UsageError, ValueError) as exc:
        print(f"vilenkin: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
