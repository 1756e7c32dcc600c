"""Command-line front end: verdict commands, sweeps, and exports.

Scalar symbols can be typed as expressions over {z, zbar, +, -, *, ^,
complex literals}; matrix symbols are read from the JSON coefficient
format.  All randomized sweeps are seeded, and identical configurations
reproduce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import decide as dc
from . import modelspace as ms
from . import operators as op
from .symbols import Symbol
from . import suites


class ExprError(ValueError):
    pass


def _tokenize(s):
    tokens = []
    i = 0
    while i < len(s):
        ch = s[i]
        if ch.isspace():
            i += 1
        elif ch in "+-*^()":
            tokens.append(ch)
            i += 1
        elif ch.isdigit() or ch == ".":
            j = i
            while j < len(s) and (s[j].isdigit() or s[j] == "."):
                j += 1
            tokens.append(float(s[i:j]))
            i = j
        elif s[i:].startswith("zbar"):
            tokens.append("zbar")
            i += 4
        elif ch == "z":
            tokens.append("z")
            i += 1
        elif ch in ("i", "j"):
            tokens.append("i")
            i += 1
        else:
            raise ExprError(f"unexpected character {ch!r} in symbol expression")
    return tokens


def parse_scalar_symbol(text) -> Symbol:
    """Parse an expression like 'zbar^2 + 2zbar + z + 2z^2' into a scalar symbol."""
    tokens = _tokenize(text)
    pos = [0]

    def peek():
        return tokens[pos[0]] if pos[0] < len(tokens) else None

    def take():
        t = peek()
        pos[0] += 1
        return t

    def parse_expr():
        sign = 1.0
        if peek() in ("+", "-"):
            sign = -1.0 if take() == "-" else 1.0
        acc = parse_term() * sign
        while peek() in ("+", "-"):
            neg = take() == "-"
            t = parse_term()
            acc = acc - t if neg else acc + t
        return acc

    def parse_term():
        acc = parse_factor()
        while True:
            nxt = peek()
            if nxt == "*":
                take()
                acc = acc * parse_factor()
            elif nxt in ("z", "zbar", "i", "(") or isinstance(nxt, float):
                acc = acc * parse_factor()  # implicit multiplication
            else:
                return acc

    def parse_factor():
        base = parse_atom()
        if peek() == "^":
            take()
            sign = 1
            if peek() in ("+", "-"):
                sign = -1 if take() == "-" else 1
            e = take()
            if not isinstance(e, float) or e != int(e):
                raise ExprError("exponent must be an integer")
            k = sign * int(e)
            return _sym_pow(base, k)
        return base

    def parse_atom():
        t = take()
        if t is None:
            raise ExprError("unexpected end of expression")
        if isinstance(t, float):
            return Symbol.scalar({0: complex(t)})
        if t == "i":
            return Symbol.scalar({0: 1j})
        if t == "z":
            return Symbol.scalar({1: 1.0})
        if t == "zbar":
            return Symbol.scalar({-1: 1.0})
        if t == "(":
            inner = parse_expr()
            if take() != ")":
                raise ExprError("unbalanced parentheses")
            return inner
        if t == "-":
            return -parse_atom()
        raise ExprError(f"unexpected token {t!r}")

    out = parse_expr()
    if pos[0] != len(tokens):
        raise ExprError(f"trailing tokens at position {pos[0]}")
    return out


def _sym_pow(s: Symbol, k: int) -> Symbol:
    if k == 0:
        return Symbol.scalar({0: 1.0})
    sup = s.support()
    if k < 0:
        if sup not in ([1], [-1]):
            raise ExprError("negative exponent only on z or zbar")
        v = s.scalar_coeff(sup[0])
        return Symbol.scalar({k * sup[0]: v ** k})
    out = s
    for _ in range(k - 1):
        out = out * s
    return out


def load_symbol(args) -> Symbol:
    if getattr(args, "phi", None) and getattr(args, "symbol", None):
        raise ExprError("give either a symbol file or --phi, not both")
    if getattr(args, "phi", None):
        return parse_scalar_symbol(args.phi)
    if getattr(args, "symbol", None):
        with open(args.symbol, "r", encoding="utf-8") as f:
            return Symbol.from_json_dict(json.load(f))
    raise ExprError("no symbol given (file argument or --phi)")


def _emit(payload, args):
    if getattr(args, "format", "json") == "csv":
        keys = sorted(payload)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        w.writerow([json.dumps(payload[k]) for k in keys])
        text = buf.getvalue().rstrip("\n")
    else:
        text = json.dumps(payload, indent=2, sort_keys=True)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    else:
        print(text)


EXIT_DECIDED = 0
EXIT_INPUT = 1
EXIT_UNDECIDED = 2

_DECIDED_TAGS = {
    "Hyponormal",
    "NotHyponormal",
    "Normal",
    "Analytic",
    "Neither",
    "NotKHyponormal",
    "NotNormalSymbol",
}


def _exit_for(tag):
    return EXIT_DECIDED if tag in _DECIDED_TAGS else EXIT_UNDECIDED


def _apply_grid(args):
    if getattr(args, "grid", None):
        ms.set_default_grid(args.grid)


def cmd_check_hyponormal(args):
    _apply_grid(args)
    phi = load_symbol(args)
    v = dc.decide_hyponormal(phi, contract_tol=args.tol_contract)
    _emit(v.to_json_dict(), args)
    return _exit_for(v.tag)


def cmd_check_k(args):
    phi = load_symbol(args)
    rep = op.k_hypo_window(phi, args.k, args.window, psd_tol=args.tol_psd)
    payload = rep.to_json_dict()
    if rep.verdict == "PSD" and not rep.exact:
        payload["verdict"] = "ConsistentUpToWindow"
    _emit(payload, args)
    if payload["verdict"] in ("NotPSD", "PSD"):
        return EXIT_DECIDED
    return EXIT_UNDECIDED


def cmd_check_square(args):
    phi = load_symbol(args)
    rep = op.square_hypo_window(phi, args.window, psd_tol=args.tol_psd)
    payload = rep.to_json_dict()
    if rep.verdict == "PSD" and not rep.exact:
        payload["verdict"] = "ConsistentUpToWindow"
    _emit(payload, args)
    if payload["verdict"] in ("NotPSD", "PSD"):
        return EXIT_DECIDED
    return EXIT_UNDECIDED


def cmd_classify(args):
    phi = load_symbol(args)
    v = dc.classify_normal_or_analytic(phi)
    _emit(v.to_json_dict(), args)
    return _exit_for(v.tag)


def cmd_complete_ustar(args):
    phi = parse_scalar_symbol(args.phi)
    psi = parse_scalar_symbol(args.psi)
    v = dc.complete_ustar(phi, psi, window=args.window)
    _emit(v.to_json_dict(), args)
    return _exit_for(v.tag)


def cmd_no_completion(args):
    phi = parse_scalar_symbol(args.phi)
    psi = parse_scalar_symbol(args.psi)
    v = dc.no_hypo_completion_shift_pair(phi, psi, window=args.window)
    _emit(v.to_json_dict(), args)
    return _exit_for(v.tag)


def _write_csv(rows, header, args):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    text = buf.getvalue()
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def cmd_suite(args):
    if args.name == "oracle-equivalence":
        rows, ok = suites.oracle_equivalence(cases=args.cases or 200, seed=args.seed)
        header = ["case", "symbol", "verdict", "min_commutator_eig", "agree"]
    elif args.name == "model-identity":
        rows, ok = suites.model_identity(cases=args.cases or 100, seed=args.seed)
        header = ["case", "n", "d", "deg_p", "max_deviation", "pass"]
    elif args.name == "completion-grid":
        rows, ok = suites.completion_grid()
        header = ["case", "family", "params", "max_commutator_entry", "normal"]
    elif args.name == "classifier-harness":
        rows, ok = suites.classifier_harness(cases=args.cases or 100, seed=args.seed)
        header = ["case", "tag", "violation"]
    else:
        raise ExprError(f"unknown suite {args.name}")
    _write_csv(rows, header, args)
    return EXIT_DECIDED if ok else EXIT_UNDECIDED


def cmd_export(args):
    if args.what == "model":
        zeros = [complex(x) for x in json.loads(args.zeros)]
        model = ms.build_M(zeros)
        _emit({"zeros": [[a.real, a.imag] for a in model.zeros],
               "matrix": [[[v.real, v.imag] for v in row] for row in model.matrix]}, args)
        return EXIT_DECIDED
    if args.what == "defect":
        phi = load_symbol(args)
        v = dc.decide_hyponormal(phi)
        _emit(v.to_json_dict(), args)
        return _exit_for(v.tag)
    if args.what == "witness":
        phi = load_symbol(args)
        rep = op.k_hypo_window(phi, args.k, args.window)
        _emit(rep.to_json_dict(), args)
        return EXIT_DECIDED
    if args.what == "completion-residual":
        windows = [int(w) for w in args.windows.split(",")]
        rows = []
        for W in windows:
            _, res = op.normal_nontoeplitz_completion(W)
            _, C = op.completion_selfadjoint_part(W)
            rows.append([W, f"{res:.16e}", f"{np.linalg.norm(C, 2):.16e}"])
        _write_csv(rows, ["window", "interior_residual", "offdiag_norm"], args)
        return EXIT_DECIDED
    if args.what == "eig-sweep":
        phi = load_symbol(args)
        windows = [int(w) for w in args.windows.split(",")]
        rows = []
        for W in windows:
            rep = op.k_hypo_window(phi, args.k, W)
            rows.append([W, args.k, f"{rep.min_eigenvalue:.16e}", rep.verdict, rep.exact])
        _write_csv(rows, ["window", "k", "min_eigenvalue", "verdict", "exact"], args)
        return EXIT_DECIDED
    raise ExprError(f"unknown export target {args.what}")


def build_parser():
    p = argparse.ArgumentParser(
        prog="blocktoeplitz",
        description="Hyponormality / k-hyponormality / completion verdicts for "
        "block Toeplitz operators with rational symbols",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, symbol=True):
        if symbol:
            sp.add_argument("symbol", nargs="?", help="path to a symbol JSON file")
            sp.add_argument("--phi", help="scalar symbol expression, e.g. 'zbar+2z'")
        sp.add_argument("--window", type=int, default=16)
        sp.add_argument("--tol-psd", type=float, default=op.PSD_TOL)
        sp.add_argument("--tol-contract", type=float, default=dc.CONTRACT_TOL)
        sp.add_argument("--grid", type=int, default=ms.GRID_START)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--format", choices=["json", "csv"], default="json")
        sp.add_argument("--out", help="write output to this file")

    sp = sub.add_parser("check-hyponormal", help="full hyponormality decision")
    add_common(sp)
    sp.set_defaults(func=cmd_check_hyponormal)

    sp = sub.add_parser("check-k", help="k-hyponormality window test")
    add_common(sp)
    sp.add_argument("--k", type=int, default=2)
    sp.set_defaults(func=cmd_check_k)

    sp = sub.add_parser("check-square", help="hyponormality of the square, windowed")
    add_common(sp)
    sp.set_defaults(func=cmd_check_square)

    sp = sub.add_parser("classify", help="normal-or-analytic classification")
    add_common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("complete-ustar", help="normal completion families for the "
                        "double conjugate-shift corner")
    sp.add_argument("--phi", required=True)
    sp.add_argument("--psi", required=True)
    add_common(sp, symbol=False)
    sp.set_defaults(func=cmd_complete_ustar, window=24)

    sp = sub.add_parser("no-completion", help="hyponormal completion impossibility "
                        "for the mixed shift corner")
    sp.add_argument("--phi", required=True)
    sp.add_argument("--psi", required=True)
    add_common(sp, symbol=False)
    sp.set_defaults(func=cmd_no_completion)

    sp = sub.add_parser("suite", help="randomized/cross-validation sweeps")
    sp.add_argument("name", choices=["oracle-equivalence", "model-identity",
                                     "completion-grid", "classifier-harness"])
    sp.add_argument("--cases", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_suite)

    sp = sub.add_parser("export", help="write matrices, witnesses, and sweeps")
    sp.add_argument("what", choices=["model", "defect", "witness",
                                     "completion-residual", "eig-sweep"])
    add_common(sp)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--zeros", help="JSON list of model zeros, e.g. '[0, 0]'")
    sp.add_argument("--windows", default="8,16,32,64")
    sp.set_defaults(func=cmd_export)

    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (ExprError, FileNotFoundError, json.JSONDecodeError, ValueError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ArithmeticError as e:
        # quadrature or doubling failed to converge: undecided, not an input error
        print(f"undecided: {e}", file=sys.stderr)
        return EXIT_UNDECIDED


if __name__ == "__main__":
    raise SystemExit(main())
