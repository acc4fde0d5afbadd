"""Command-line interface.

Exit codes: 0 proved / holds / found, 1 search exhausted / fails / none
found, 2 budget or depth limit hit (inconclusive), 3 input or usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import complex_algebra as ca
from .calculus import (
    DEFAULT_BUDGET,
    DEFAULT_DEPTH,
    Limits,
    NoProofWithinBound,
    RuleSet,
    check_proof,
    export_latex,
    proof_to_json,
    prove,
    render_text,
)
from .completeness import (
    DEFAULT_COUNTERMODEL_SIZE,
    EmbeddingError,
    embed,
    search_countermodel,
    verify_embedding,
)
from .fields import LinalgError, field_from_name
from .kalgebra import (
    PSEUDO_CHECKERS,
    builtin_octonions,
    builtin_quaternions,
    check_pseudo,
    check_pseudo_modal,
    random_algebra,
)
from .relations import DEFAULT_RELATION_DIM_BOUND, RelationError, validate_relation
from .syntax import (
    ParseError,
    parse_algebra,
    parse_formula,
    parse_lexicon,
    parse_poset,
    parse_relation,
    parse_sequent,
    parse_structure,
    parse_valuation,
    parse_vector,
    print_algebra,
    print_poset,
    sentence_attempts,
    bracketing_text,
)

EXIT_OK, EXIT_NO, EXIT_LIMIT, EXIT_ERROR = 0, 1, 2, 3
MODAL_PSEUDO = ("right_assoc", "left_comm")


class CliError(Exception):
    pass


@dataclass
class Config:
    depth: int = DEFAULT_DEPTH
    budget: int = DEFAULT_BUDGET
    adia: bool = False
    diac: bool = False
    seed: int = 0
    format: str = "text"
    dim_bound: int = DEFAULT_RELATION_DIM_BOUND
    poset_bound: int = DEFAULT_COUNTERMODEL_SIZE

    def __post_init__(self):
        for name in ("depth", "budget", "dim_bound", "poset_bound"):
            if getattr(self, name) <= 0:
                raise CliError(f"--{name.replace('_', '-')} must be positive")

    @property
    def rules(self) -> RuleSet:
        return RuleSet(enable_A_dia=self.adia, enable_dia_C=self.diac)

    @property
    def limits(self) -> Limits:
        return Limits(depth=self.depth, node_budget=self.budget)


# ------------------------------------------------------------------ output


_COLORS = {"proved": 32, "holds": 32, "pass": 32, "found": 32, "fails": 31, "exhausted": 31, "fail": 31}


def _style(word: str) -> str:
    if os.environ.get("LAMBEKWS_COLOR", "") in ("", "0", "never"):
        return word
    code = _COLORS.get(word, 33)
    return f"\033[{code}m{word}\033[0m"


class Out:
    def __init__(self, cfg: Config, stream=None):
        self.cfg = cfg
        self.stream = stream or sys.stdout

    def text(self, s: str = ""):
        if self.cfg.format != "json-lines":
            print(s, file=self.stream)

    def record(self, obj: dict):
        if self.cfg.format == "json-lines":
            print(json.dumps(obj, sort_keys=True), file=self.stream)


def _vec_text(v) -> str:
    coords = v.coords if hasattr(v, "coords") else v
    return "(" + ",".join(str(c) for c in coords) + ")"


def _sub_text(S) -> str:
    return "<" + ", ".join(_vec_text(b) for b in S.basis) + ">"


def _witness_text(w) -> list:
    if w is None:
        return None
    out = []
    for x in w:
        if hasattr(x, "basis"):
            out.append(_sub_text(x))
        elif hasattr(x, "coords"):
            out.append(_vec_text(x))
        elif isinstance(x, tuple):
            out.append(_vec_text(x))
        else:
            out.append(str(x))
    return out


# ----------------------------------------------------------------- inputs


def _read(path_or_text: str) -> str:
    p = Path(path_or_text)
    if p.is_file():
        return p.read_text()
    raise CliError(f"no such file: {path_or_text}")


def _sequent_arg(args) -> "object":
    text = args.sequent
    if text is None and getattr(args, "file", None):
        text = _read(args.file).strip()
    if not text:
        raise CliError("a sequent is required (argument or --file)")
    return parse_sequent(text)


def load_algebra(spec: str, seed: int = 0):
    """A file path, ``quaternions``, ``octonions`` or ``random:FIELD:DIM``."""
    if spec == "quaternions":
        return builtin_quaternions()
    if spec == "octonions":
        return builtin_octonions()
    if spec.startswith("random:"):
        try:
            _, fname, dim = spec.split(":")
            return random_algebra(field_from_name(fname), int(dim), seed)
        except ValueError as e:
            raise CliError(f"bad random algebra spec {spec!r}: {e}") from None
    return parse_algebra(_read(spec))


def load_relation(path: str | None, A):
    if path is None:
        return None
    return parse_relation(_read(path), A.field, A.dim)


def _lexicon(path: str | None):
    if path in (None, "builtin:extraction"):
        return parse_lexicon(resources.files("lambekws").joinpath("data/extraction.lex").read_text())
    return parse_lexicon(_read(path))


# ---------------------------------------------------------------- commands


def _emit_proof(out: Out, cfg: Config, proof, seq):
    if cfg.format == "latex":
        out.text(export_latex(proof).rstrip("\n"))
    elif cfg.format == "json-lines":
        out.record({"command": "prove", "sequent": seq.text, "status": "proved", "proof": proof_to_json(proof)})
    else:
        out.text(f"{_style('proved')}: {seq}  ({proof.inferences(False)} logical inferences)")
        out.text(render_text(proof))


def _emit_failure(out: Out, cfg: Config, res: NoProofWithinBound, hint: bool = True) -> int:
    seq = res.sequent
    rec = {"command": "prove", "sequent": seq.text, "status": res.status, "nodes": res.nodes}
    if res.exhausted:
        out.text(f"{_style('exhausted')}: {seq} is not derivable with the enabled rules")
        if hint:
            found = search_countermodel(seq, cfg.poset_bound)
            if found is not None:
                P, val = found
                vt = ", ".join(f"{a}={x}" for a, x in sorted(val.items()))
                out.text(f"hint: refuted in a {P.n}-element modal residuated poset with {vt} (see 'countermodel')")
                rec["countermodel"] = {"size": P.n, "valuation": val}
        out.record(rec)
        return EXIT_NO
    why = "node budget" if res.budget_hit else "depth limit"
    out.text(f"{_style('inconclusive')}: {why} reached after {res.nodes} nodes for {seq}")
    out.record(rec)
    return EXIT_LIMIT


def cmd_prove(args, cfg: Config, out: Out) -> int:
    if args.sentence:
        return _prove_sentence(args, cfg, out)
    seq = _sequent_arg(args)
    res = prove(seq, cfg.rules, cfg.limits)
    if isinstance(res, NoProofWithinBound):
        return _emit_failure(out, cfg, res)
    if not check_proof(res):
        raise CliError("internal error: found proof failed the checker")
    _emit_proof(out, cfg, res, seq)
    return EXIT_OK


def _prove_sentence(args, cfg: Config, out: Out) -> int:
    lex = _lexicon(args.lexfile)
    if not args.goal:
        raise CliError("--sentence needs --goal")
    words = args.sentence.split()
    goal = parse_formula(args.goal)
    attempts = sentence_attempts(words, lex, goal, cfg.rules, cfg.limits)
    proved = [a for a in attempts if a.proved]
    for a in proved:
        rec = {
            "command": "prove",
            "sentence": args.sentence,
            "bracketing": bracketing_text(a.bracketing, words),
            "sequent": a.sequent.text,
            "status": "proved",
            "proof": proof_to_json(a.outcome),
        }
        if cfg.format == "json-lines":
            out.record(rec)
        elif cfg.format == "latex":
            out.text(export_latex(a.outcome).rstrip("\n"))
        else:
            out.text(f"{_style('proved')}: {bracketing_text(a.bracketing, words)}")
            out.text(render_text(a.outcome))
    if proved:
        return EXIT_OK
    limited = any(not a.outcome.exhausted for a in attempts)
    status = "inconclusive" if limited else "exhausted"
    out.text(f"{_style(status)}: no derivation of {args.sentence!r} => {goal} over {len(attempts)} bracketings/assignments")
    out.record({"command": "prove", "sentence": args.sentence, "status": "budget" if limited else "exhausted"})
    return EXIT_LIMIT if limited else EXIT_NO


def cmd_export_latex(args, cfg: Config, out: Out) -> int:
    cfg.format = "latex"
    return cmd_prove(args, cfg, out)


def cmd_parse(args, cfg: Config, out: Out) -> int:
    if args.kind == "lexicon":
        lex = _lexicon(args.text)
        for w, fs in lex.entries.items():
            for f in fs:
                out.text(f"{w} : {f}")
                out.record({"command": "parse", "kind": "lexicon", "word": w, "formula": f.text})
        return EXIT_OK
    parser = {"formula": parse_formula, "structure": parse_structure, "sequent": parse_sequent}[args.kind]
    obj = parser(args.text)
    out.text(obj.text)
    out.record({"command": "parse", "kind": args.kind, "text": obj.text})
    return EXIT_OK


def _verdict_row(out: Out, name: str, v, algebra: str):
    wit = _witness_text(v.witness)
    extra = "" if v.exhaustive else " (sampled grid)"
    line = f"{name:<14} {_style(v.status)}{extra}"
    if wit:
        line += "  witness: " + " ".join(wit)
    out.text(line)
    out.record(
        {
            "command": "check-pseudo",
            "algebra": algebra,
            "property": name,
            "status": v.status,
            "witness": wit,
            "exhaustive": v.exhaustive,
        }
    )


def cmd_check_algebra(args, cfg: Config, out: Out) -> int:
    A = load_algebra(args.algebra, cfg.seed)
    R = load_relation(args.relation, A)
    props = args.property or list(PSEUDO_CHECKERS) + (list(MODAL_PSEUDO) if R is not None else [])
    out.text(f"algebra {args.algebra}: field {A.field.name}, dim {A.dim}")
    for prop in props:
        if prop in MODAL_PSEUDO:
            if R is None:
                raise CliError(f"{prop} needs --relation")
            v = check_pseudo_modal(A, R, prop)
        else:
            v = check_pseudo(A, prop, seed=cfg.seed) if prop != "unital" else check_pseudo(A, prop)
        _verdict_row(out, prop, v, args.algebra)
    return EXIT_OK


def cmd_check_pseudo(args, cfg: Config, out: Out) -> int:
    A = load_algebra(args.algebra, cfg.seed)
    prop = args.property.removeprefix("pseudo_").removeprefix("pseudo-")
    if prop in MODAL_PSEUDO:
        R = load_relation(args.relation, A)
        if R is None:
            raise CliError(f"{prop} needs --relation")
        v = check_pseudo_modal(A, R, prop)
    elif prop in ("unital", "monoidal"):
        cand = parse_vector(args.candidate, A.field, A.dim) if args.candidate else None
        from .linalg import Vector

        v = check_pseudo(A, prop, candidate=None if cand is None else Vector(A.field, cand))
    else:
        v = check_pseudo(A, prop, seed=cfg.seed)
    _verdict_row(out, prop, v, args.algebra)
    return EXIT_OK if v.holds else EXIT_NO


def cmd_check_vplus(args, cfg: Config, out: Out) -> int:
    A = load_algebra(args.algebra, cfg.seed)
    R = load_relation(args.relation, A)
    w = ca.check_vplus_property(A, args.property, R, bound=args.vplus_bound)
    status = "holds" if w.holds else "fails"
    wit = _witness_text(w.counterexample)
    line = f"{args.property:<18} {_style(status)}"
    if wit:
        line += "  witness: " + " ".join(wit)
    if w.unit is not None:
        line += f"  unit: {_sub_text(w.unit)}"
    out.text(line)
    out.record({"command": "check-vplus", "property": args.property, "status": status, "witness": wit})
    return EXIT_OK if w.holds else EXIT_NO


def cmd_validate_relation(args, cfg: Config, out: Out) -> int:
    if args.algebra:
        A = load_algebra(args.algebra, cfg.seed)
        R = parse_relation(_read(args.relation), A.field, A.dim)
    else:
        field = field_from_name(args.field) if args.field else None
        R = parse_relation(_read(args.relation), field, args.dim)
    rep = validate_relation(R)
    for name, (ok, wit) in rep.items():
        status = "pass" if ok else "fail"
        line = f"{name} {_style(status)}"
        if wit is not None:
            line += "  witness: " + " ".join(_witness_text(wit))
        out.text(line)
        out.record({"command": "validate-relation", "clause": name, "ok": ok, "witness": _witness_text(wit)})
    return EXIT_OK if rep.ok else EXIT_NO


def _poset(path: str):
    if path == "builtin:lukasiewicz3":
        return parse_poset(resources.files("lambekws").joinpath("data/lukasiewicz3.poset").read_text())
    return parse_poset(_read(path))


def cmd_embed(args, cfg: Config, out: Out) -> int:
    P = _poset(args.poset)
    E = embed(P)
    out.text(f"embedded {P.n}-element poset into F2^{E.algebra.dim}")
    for k, S in enumerate(E.h):
        out.text(f"h(p{k}) = span{{{', '.join(E.algebra.basis_names[b.index(1)] for b in S.basis)}}}")
    out.record({"command": "embed", "n": P.n, "dim": E.algebra.dim, "h": [[list(b) for b in S.basis] for S in E.h]})
    if args.out:
        Path(args.out).write_text(print_algebra(E.algebra))
        out.text(f"algebra written to {args.out}")
    return EXIT_OK


def cmd_verify_embedding(args, cfg: Config, out: Out) -> int:
    P = _poset(args.poset)
    E = embed(P)
    rep = verify_embedding(E)
    for clause, (ok, wit) in rep.items():
        status = "pass" if ok else "fail"
        line = f"{clause:<7} {_style(status)}"
        if wit is not None:
            line += f"  at {wit}"
        out.text(line)
        out.record({"command": "verify-embedding", "clause": clause, "ok": ok, "witness": wit})
    return EXIT_OK if rep.ok else EXIT_NO


def cmd_countermodel(args, cfg: Config, out: Out) -> int:
    seq = _sequent_arg(args)
    found = search_countermodel(seq, args.max_size)
    if found is None:
        out.text(f"no countermodel of size <= {args.max_size} (this does not imply derivability)")
        out.record({"command": "countermodel", "sequent": seq.text, "status": "none"})
        return EXIT_NO
    P, val = found
    out.text(f"{_style('found')}: {P.n}-element modal residuated poset")
    out.text(print_poset(P).rstrip("\n"))
    out.text("valuation: " + ", ".join(f"{a}={x}" for a, x in sorted(val.items())))
    rec = {"command": "countermodel", "sequent": seq.text, "status": "found", "poset": print_poset(P), "valuation": val}
    if args.embed:
        E = embed(P)
        ok = ca.holds(E.algebra, E.R, E.valuation(val), seq)
        out.text(f"embedded model over F2^{E.algebra.dim}: sequent {'holds' if ok else 'fails'}")
        rec["embedded_holds"] = ok
    out.record(rec)
    return EXIT_OK


def cmd_eval(args, cfg: Config, out: Out) -> int:
    A = load_algebra(args.algebra, cfg.seed)
    R = load_relation(args.relation, A)
    val = parse_valuation(_read(args.valuation), A.field, A.dim)
    seq = _sequent_arg(args)
    ok = ca.holds(A, R, val, seq, bound=cfg.dim_bound)
    status = "holds" if ok else "fails"
    out.text(f"{_style(status)}: {seq}")
    if args.show:
        out.text(f"  lhs = {_sub_text(ca.eval_term(A, R, val, seq.lhs, cfg.dim_bound))}")
        out.text(f"  rhs = {_sub_text(ca.eval_term(A, R, val, seq.rhs, cfg.dim_bound))}")
    out.record({"command": "eval", "sequent": seq.text, "status": status})
    return EXIT_OK if ok else EXIT_NO


# ------------------------------------------------------------------ parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_ERROR)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=DEFAULT_DEPTH, help="proof search depth limit (default %(default)s)")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="proof search node budget (default %(default)s)")
    common.add_argument("--adia", action="store_true", help="enable the A-dia structural rule")
    common.add_argument("--diac", action="store_true", help="enable the dia-C structural rule")
    common.add_argument("--seed", type=int, default=0, help="seed for random algebras and sampling grids")
    common.add_argument("--format", choices=("text", "latex", "json-lines"), default="text")
    common.add_argument("--dim-bound", type=int, default=DEFAULT_RELATION_DIM_BOUND, help="dimension bound for dia/box enumeration")

    p = _Parser(prog="lambekws", description="Modal Lambek calculus prover and vector-space model checker")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("prove", cmd_prove, "search for a derivation")
    sp.add_argument("sequent", nargs="?")
    sp.add_argument("--file")
    sp.add_argument("--lexfile", help="lexicon file (default: the bundled extraction lexicon)")
    sp.add_argument("--sentence")
    sp.add_argument("--goal")

    sp = add("export-latex", cmd_export_latex, "prove and print bussproofs source")
    sp.add_argument("sequent", nargs="?")
    sp.add_argument("--file")
    sp.add_argument("--lexfile")
    sp.add_argument("--sentence")
    sp.add_argument("--goal")

    sp = add("parse", cmd_parse, "parse and normalise a formula, structure, sequent or lexicon file")
    sp.add_argument("text")
    sp.add_argument("--kind", choices=("formula", "structure", "sequent", "lexicon"), default="sequent")

    sp = add("check-algebra", cmd_check_algebra, "sweep the pseudo-properties of an algebra")
    sp.add_argument("algebra", help="file, 'quaternions', 'octonions' or 'random:FIELD:DIM'")
    sp.add_argument("--property", action="append", choices=list(PSEUDO_CHECKERS) + list(MODAL_PSEUDO))
    sp.add_argument("--relation")

    sp = add("check-pseudo", cmd_check_pseudo, "check one pseudo-property")
    sp.add_argument("algebra")
    sp.add_argument("property")
    sp.add_argument("--candidate", help="unit candidate vector")
    sp.add_argument("--relation")

    sp = add("check-vplus", cmd_check_vplus, "check a property of the subspace lattice by enumeration")
    sp.add_argument("algebra")
    sp.add_argument("property", choices=ca.VPLUS_PROPERTIES)
    sp.add_argument("--relation")
    sp.add_argument("--vplus-bound", type=int, default=ca.DEFAULT_VPLUS_BOUND)

    sp = add("validate-relation", cmd_validate_relation, "check L1R, L2R and L3R")
    sp.add_argument("relation")
    sp.add_argument("--algebra")
    sp.add_argument("--field")
    sp.add_argument("--dim", type=int)

    sp = add("embed", cmd_embed, "embed a finite modal residuated poset")
    sp.add_argument("poset", help="poset file or 'builtin:lukasiewicz3'")
    sp.add_argument("--out", help="write the algebra file here")

    sp = add("verify-embedding", cmd_verify_embedding, "check the six embedding clauses")
    sp.add_argument("poset")

    sp = add("countermodel", cmd_countermodel, "search small modal residuated posets for a refutation")
    sp.add_argument("sequent", nargs="?")
    sp.add_argument("--file")
    sp.add_argument("--max-size", type=int, default=DEFAULT_COUNTERMODEL_SIZE)
    sp.add_argument("--embed", action="store_true", help="also refute in the embedded vector-space model")

    sp = add("eval", cmd_eval, "evaluate a sequent in an algebra under a valuation")
    sp.add_argument("algebra")
    sp.add_argument("valuation")
    sp.add_argument("sequent", nargs="?")
    sp.add_argument("--file")
    sp.add_argument("--relation")
    sp.add_argument("--show", action="store_true", help="print both sides")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = Config(
            depth=args.depth,
            budget=args.budget,
            adia=args.adia,
            diac=args.diac,
            seed=args.seed,
            format=args.format,
            dim_bound=args.dim_bound,
        )
        return args.func(args, cfg, Out(cfg))
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
    except (CliError, LinalgError, RelationError, EmbeddingError, KeyError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
