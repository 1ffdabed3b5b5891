"""Command-line front end: JSON in, deterministic JSON out.

Exit codes separate mathematical verdicts from failures: 0 for a positive
result, 2 for a clean mathematical "no" (irrelevant pair, failed match,
non-automorphic character), 1 for parse or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import repcore
from .repcore import (
    AParam,
    AparamError,
    SymbolTable,
    enumerate_params,
    fmt_half,
    parse_param,
    render_param,
)
from . import relevance as rel
from . import lfun
from . import globlfun
from . import chars as chars_mod
from . import glbranch

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO = 2


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2, default=str) + "\n")


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_table(args) -> SymbolTable:
    tables = []
    if getattr(args, "symbols", None):
        tables.append(_load_json(args.symbols))
    for attr in ("m", "n", "param"):
        path = getattr(args, attr, None)
        if path and Path(path).is_file():
            try:
                data = _load_json(path)
            except (OSError, json.JSONDecodeError):
                continue
            if isinstance(data, dict) and "symbols" in data:
                tables.append(data)
    syms = []
    for data in tables:
        syms.extend(SymbolTable.from_json(data).symbols())
    return SymbolTable([s for s in syms if not s.is_trivial])


def _load_param(path: str, symtab: SymbolTable) -> AParam:
    return repcore.param_from_json(_load_json(path), symtab)


def _witness_json(w: rel.RelevanceWitness) -> list[dict]:
    out = []
    for (sym, d), lw in w.labels:
        out.append(
            {
                "label": f"{sym.id}:D{d}",
                "mplus": list(lw.mplus),
                "mminus": list(lw.mminus),
                "nplus": list(lw.nplus),
                "nminus": list(lw.nminus),
            }
        )
    return out


def _character_json(c) -> list[dict] | None:
    if c is None:
        return None
    return [
        {"side": side, "weil": sid, "d": d, "a": a, "value": val}
        for (side, sid, d, a), val in c.values
    ]


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_parse(args) -> int:
    symtab = _load_table(args)
    p = parse_param(args.expr, symtab, args.parity)
    payload = repcore.param_to_json(p)
    payload.update({"dim": p.dim, "canonical": render_param(p)})
    _emit(payload)
    return EXIT_OK


def _cmd_relevance_check(args) -> int:
    symtab = _load_table(args)
    m = _load_param(args.m, symtab)
    npath = Path(args.n)
    if npath.is_dir():
        rows, relevant_count = [], 0
        for child in sorted(npath.glob("*.json")):
            n = _load_param(str(child), symtab)
            verdict = rel.check_relevant(m, n)
            rows.append(
                {"file": child.name, "param": render_param(n), "relevant": bool(verdict)}
            )
            relevant_count += bool(verdict)
        _emit({"batch": rows, "relevant_count": relevant_count})
        return EXIT_OK if relevant_count else EXIT_NO
    n = _load_param(args.n, symtab)
    verdict = rel.check_relevant(m, n)
    if verdict:
        _emit({"relevant": True, "witness": _witness_json(verdict)})
        return EXIT_OK
    _emit({"relevant": False, "reason": verdict.reason})
    return EXIT_NO


def _cmd_relevance_special(args) -> int:
    symtab = _load_table(args)
    m, n = _load_param(args.m, symtab), _load_param(args.n, symtab)
    pairs = rel.special_pairs(m, n)
    _emit(
        {
            "pairs": [
                {
                    "i": {"weil": sp.i_row.weil.id, "d": sp.i_row.d_dim,
                          "m_dim": sp.i_row.m_dim, "n_dim": sp.i_row.n_dim},
                    "j": {"weil": sp.j_row.weil.id, "d": sp.j_row.d_dim,
                          "m_dim": sp.j_row.m_dim, "n_dim": sp.j_row.n_dim},
                }
                for sp in pairs
            ]
        }
    )
    return EXIT_OK


def _cmd_relevance_delta(args) -> int:
    symtab = _load_table(args)
    m = _load_param(args.m, symtab)
    members = rel.delta_class_search(m, bound=args.bound)
    _emit({"count": len(members), "members": [render_param(q) for q in members]})
    return EXIT_OK


def _cmd_lfun_ord(args) -> int:
    symtab = _load_table(args)
    p = _load_param(args.param, symtab)
    s0 = repcore.parse_half(args.at)
    order = lfun.ord_at(lfun.to_formal(p), s0)
    _emit({"at": fmt_half(s0), "order": order})
    return EXIT_OK


def _cmd_lfun_gl_ratio(args) -> int:
    symtab = _load_table(args)
    m, n = _load_param(args.m, symtab), _load_param(args.n, symtab)
    num = lfun.ord_at(lfun.tensor_formal(m, repcore.dual_param(n)), Fraction(1, 2)) + lfun.ord_at(
        lfun.tensor_formal(repcore.dual_param(m), n), Fraction(1, 2)
    )
    den = lfun.ord_at(lfun.tensor_formal(m, repcore.dual_param(m)), 1) + lfun.ord_at(
        lfun.tensor_formal(n, repcore.dual_param(n)), 1
    )
    _emit({"numerator_order": num, "denominator_order": den, "signed_order": num - den})
    return EXIT_OK


def _cmd_lfun_bessel(args) -> int:
    symtab = _load_table(args)
    m, n = _load_param(args.m, symtab), _load_param(args.n, symtab)
    num, den, signed = lfun.bessel_ratio_order(m, n, detail=True)
    _emit({"numerator_order": num, "denominator_order": den, "signed_order": signed})
    return EXIT_OK


def _cmd_globlfun_ratio(args) -> int:
    symtab = _load_table(args)
    m, n = _load_param(args.m, symtab), _load_param(args.n, symtab)
    expr = globlfun.global_ratio_order(m, n)
    payload = {"expression": expr.render(), "constant": expr.const}
    if args.bind:
        data = _load_json(args.bind)
        bindings = {
            globlfun.z_key(r["a"], r["b"]): int(r["value"]) for r in data.get("z", [])
        }
        payload["value"] = expr.substitute(bindings)
    _emit(payload)
    return EXIT_OK


def _load_signs(args) -> chars_mod.SignTable:
    if not args.signs:
        return chars_mod.SignTable()
    return chars_mod.SignTable.from_json(_load_json(args.signs))


def _cmd_chars_predict(args) -> int:
    symtab = _load_table(args)
    m, n = _load_param(args.m, symtab), _load_param(args.n, symtab)
    out = chars_mod.predict_multiplicity(m, n, _load_signs(args))
    payload = {"d": out["d"], "character": _character_json(out.get("character"))}
    if "reason" in out:
        payload["reason"] = out["reason"]
    _emit(payload)
    return EXIT_OK if out["d"] else EXIT_NO


def _cmd_chars_automorphy(args) -> int:
    symtab = _load_table(args)
    m, n = _load_param(args.m, symtab), _load_param(args.n, symtab)
    out = chars_mod.automorphy_test(m, n, _load_signs(args))
    _emit(out)
    return EXIT_OK if out["automorphic"] else EXIT_NO


def _cmd_chars_supercuspidal(args) -> int:
    symtab = _load_table(args)
    m = _load_param(args.m, symtab)
    if args.alpha:
        data = _load_json(args.alpha)
        alpha = chars_mod.CharacterAssignment.of(
            {
                (r.get("side", "M"), r["weil"], int(r["d"]), int(r.get("a", 1))): int(r["value"])
                for r in data["values"]
            }
        )
        ok = chars_mod.supercuspidal_support(m, alpha)
        _emit({"supercuspidal": ok})
        return EXIT_OK if ok else EXIT_NO
    cands = chars_mod.alternating_characters(m) if chars_mod.without_gaps(m) else []
    _emit(
        {
            "without_gaps": chars_mod.without_gaps(m),
            "alternating_characters": [_character_json(c) for c in cands],
        }
    )
    return EXIT_OK if cands else EXIT_NO


def _cmd_chars_ggp(args) -> int:
    symtab = _load_table(args)
    m, n = _load_param(args.m, symtab), _load_param(args.n, symtab)
    c = chars_mod.ggp_character(m, n, _load_signs(args))
    _emit({"character": _character_json(c)})
    return EXIT_OK


def _cmd_glbranch_decide(args) -> int:
    symtab = _load_table(args)
    m, n = _load_param(args.m, symtab), _load_param(args.n, symtab)
    out = glbranch.decide_gl_branching(m, n)
    _emit(out)
    if out["inconclusive"]:
        return EXIT_NO
    return EXIT_OK if out["hom_nonzero"] else EXIT_NO


def _cmd_glbranch_support(args) -> int:
    symtab = _load_table(args)
    prod = glbranch.parse_product(args.product, symtab)
    sup = glbranch.support(prod)
    _emit(
        {
            "rank": prod.rank,
            "support": {
                line: [
                    {"exp": fmt_half(e), "mult": c} for e, c in sorted(cnt.items())
                ]
                for line, cnt in sup.items()
            },
        }
    )
    return EXIT_OK


def _cmd_enumerate(args) -> int:
    symtab = _load_table(args)
    parity = args.parity
    partner = {"symplectic": "orthogonal", "orthogonal": "symplectic",
               "conjugate-symplectic": "conjugate-orthogonal",
               "conjugate-orthogonal": "conjugate-symplectic", "gl": "gl"}[parity]
    rows, visited = [], 0
    for m in enumerate_params(args.dim, symtab, parity, max_mult=args.max_mult):
        for n in enumerate_params(args.partner_dim, symtab, partner, max_mult=args.max_mult):
            visited += 1
            if visited > args.bound:
                raise AparamError(f"enumeration bound {args.bound} exceeded")
            verdict = rel.check_relevant(m, n)
            row = {
                "m": render_param(m),
                "n": render_param(n),
                "relevant": bool(verdict),
            }
            try:
                if parity == "gl":
                    row["signed_order"] = lfun.gl_ratio_order(m, n)
                elif parity in ("symplectic", "conjugate-symplectic"):
                    row["signed_order"] = lfun.bessel_ratio_order(m, n)
                else:
                    row["signed_order"] = lfun.bessel_ratio_order(n, m)
            except AparamError:
                pass
            rows.append(row)
    _emit({"visited": visited, "bound": args.bound, "rows": rows})
    return EXIT_OK


# ---------------------------------------------------------------------------
# worked-example registry


def _registry():
    symtab = SymbolTable(
        [repcore.WeilSymbol("beta", 1, repcore.ORTH, "beta")]
    )

    def counterexample_1():
        m = parse_param("1:D1:A10", symtab, "symplectic")
        n = parse_param("1:D1:A5 + 1:D7:A1 + 1:D9:A1", symtab, "orthogonal")
        num, den, signed = lfun.bessel_ratio_order(m, n, detail=True)
        computed = {
            "signed_order": signed,
            "relevant": rel.is_relevant(m, n),
        }
        expected = {"signed_order": 0, "relevant": False}
        return expected, computed

    def counterexample_2():
        m = parse_param("1:D3:A4 + 1:D5:A4", symtab, "symplectic")
        n = parse_param("1:D3:A3 + 1:D5:A5", symtab, "orthogonal")
        num, den, signed = lfun.bessel_ratio_order(m, n, detail=True)
        computed = {
            "numerator_order": num,
            "denominator_order": den,
            "signed_order": signed,
            "relevant": rel.is_relevant(m, n),
        }
        expected = {
            "numerator_order": 25,
            "denominator_order": 20,
            "signed_order": 5,
            "relevant": True,
        }
        return expected, computed

    def onedim(nval: int, beta: str):
        mstr = f"1:D1:A{2 * nval}"
        if beta == "trivial":
            nstr = f"1:D1:A1 + 1:D1:A{2 * nval - 1}"
        else:
            nstr = f"beta:D1:A1 + 1:D1:A{2 * nval - 1}"
        m = parse_param(mstr, symtab, "symplectic")
        n = parse_param(nstr, symtab, "orthogonal")
        num, den, signed = lfun.bessel_ratio_order(m, n, detail=True)
        expected_num = 2 * nval if beta == "trivial" else 2 * nval - 1
        expected_signed = 1 if (nval == 1 and beta == "trivial") else 0
        return (
            {"numerator_order": expected_num, "signed_order": expected_signed},
            {"numerator_order": num, "denominator_order": den, "signed_order": signed},
        )

    def maj_family(nval: int):
        n_param = parse_param(
            " + ".join(f"1:D{2 * j - 1}:A1" for j in range(1, nval + 1)),
            symtab,
            "orthogonal",
        )
        pattern = {}
        for mask in range(1 << nval):
            terms = []
            for i in range(1, nval + 1):
                if mask & (1 << (i - 1)):
                    terms.append(f"1:D1:A{2 * i}")
                else:
                    terms.append(f"1:D{2 * i}:A1")
            m = parse_param(" + ".join(terms), symtab, "symplectic")
            subset = tuple(i for i in range(1, nval + 1) if mask & (1 << (i - 1)))
            pattern[subset] = rel.is_relevant(m, n_param)
        relevant_subsets = sorted(k for k, v in pattern.items() if v)
        return (
            {"relevant_subsets": [[], [1]]},
            {"relevant_subsets": [list(s) for s in relevant_subsets]},
        )

    return {
        "sec14-counterexample-1": lambda args: counterexample_1(),
        "sec14-counterexample-2": lambda args: counterexample_2(),
        "sec12-onedim-characters": lambda args: onedim(args.n, args.beta),
        "sec7-MAJ-family": lambda args: maj_family(args.n),
    }


def _cmd_reproduce(args) -> int:
    registry = _registry()
    if args.id not in registry:
        raise AparamError(
            f"unknown example id {args.id!r}; known: {', '.join(sorted(registry))}"
        )
    expected, computed = registry[args.id](args)
    ok = all(computed.get(k) == v for k, v in expected.items())
    _emit({"id": args.id, "ok": ok, "expected": expected, "computed": computed})
    return EXIT_OK if ok else EXIT_ERROR


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="aparam", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add_symbols(p):
        p.add_argument("--symbols", help="symbol table JSON file")

    p = sub.add_parser("parse", help="parse an expression to canonical JSON")
    p.add_argument("expr")
    p.add_argument("--parity", default="gl", choices=repcore.PARITIES)
    add_symbols(p)
    p.set_defaults(func=_cmd_parse)

    grp = sub.add_parser("relevance", help="relevance of a pair").add_subparsers(
        dest="sub", required=True
    )
    p = grp.add_parser("check")
    p.add_argument("m")
    p.add_argument("n", help="parameter file or a directory of candidates")
    add_symbols(p)
    p.set_defaults(func=_cmd_relevance_check)
    p = grp.add_parser("special-pairs")
    p.add_argument("m")
    p.add_argument("n")
    add_symbols(p)
    p.set_defaults(func=_cmd_relevance_special)
    p = grp.add_parser("delta-class")
    p.add_argument("m")
    p.add_argument("--bound", type=int, default=100_000)
    add_symbols(p)
    p.set_defaults(func=_cmd_relevance_delta)

    grp = sub.add_parser("lfun", help="local L-order calculus").add_subparsers(
        dest="sub", required=True
    )
    p = grp.add_parser("ord")
    p.add_argument("param")
    p.add_argument("--at", required=True, help="positive half-integer, e.g. 1/2")
    add_symbols(p)
    p.set_defaults(func=_cmd_lfun_ord)
    p = grp.add_parser("gl-ratio")
    p.add_argument("m")
    p.add_argument("n")
    add_symbols(p)
    p.set_defaults(func=_cmd_lfun_gl_ratio)
    p = grp.add_parser("bessel-ratio")
    p.add_argument("m")
    p.add_argument("n")
    add_symbols(p)
    p.set_defaults(func=_cmd_lfun_bessel)

    grp = sub.add_parser("globlfun", help="global L-order calculus").add_subparsers(
        dest="sub", required=True
    )
    p = grp.add_parser("ratio")
    p.add_argument("m")
    p.add_argument("n")
    p.add_argument("--bind", help="bindings JSON: {\"z\": [{\"a\",\"b\",\"value\"}]}")
    add_symbols(p)
    p.set_defaults(func=_cmd_globlfun_ratio)

    grp = sub.add_parser("chars", help="sign characters").add_subparsers(
        dest="sub", required=True
    )
    for name, fn, needs_n in (
        ("predict", _cmd_chars_predict, True),
        ("automorphy", _cmd_chars_automorphy, True),
        ("ggp-character", _cmd_chars_ggp, True),
    ):
        p = grp.add_parser(name)
        p.add_argument("m")
        if needs_n:
            p.add_argument("n")
        p.add_argument("--signs", help="sign table JSON file")
        add_symbols(p)
        p.set_defaults(func=fn)
    p = grp.add_parser("supercuspidal")
    p.add_argument("m")
    p.add_argument("--alpha", help="character JSON file; omit to enumerate")
    p.add_argument("--signs", help="unused; accepted for uniformity")
    add_symbols(p)
    p.set_defaults(func=_cmd_chars_supercuspidal)

    grp = sub.add_parser("glbranch", help="general-linear branching").add_subparsers(
        dest="sub", required=True
    )
    p = grp.add_parser("decide")
    p.add_argument("m")
    p.add_argument("n")
    add_symbols(p)
    p.set_defaults(func=_cmd_glbranch_decide)
    p = grp.add_parser("support")
    p.add_argument("product", help="e.g. 'St2 x Z2@0.5'")
    add_symbols(p)
    p.set_defaults(func=_cmd_glbranch_support)

    p = sub.add_parser("enumerate", help="tabulate pairs within bounds")
    p.add_argument("--parity", default="symplectic", choices=repcore.PARITIES)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--partner-dim", type=int, required=True)
    p.add_argument("--max-mult", type=int, default=None)
    p.add_argument("--bound", type=int, default=100_000)
    add_symbols(p)
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("reproduce", help="run a registered worked example")
    p.add_argument("id")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--beta", default="nontrivial", choices=("trivial", "nontrivial"))
    p.set_defaults(func=_cmd_reproduce)

    return ap


def run(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except AparamError as exc:
        _emit({"error": str(exc)})
        return EXIT_ERROR
    except (OSError, json.JSONDecodeError) as exc:
        _emit({"error": str(exc)})
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
