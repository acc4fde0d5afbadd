"""Concrete syntax: formulas, structures, sequents, lexicons and the plain-text model files.

Formula syntax (all binary connectives non-associative)::

    F ::= U | U '*' U | U '\\' U | U '/' U
    U ::= atom | 'dia' U | 'box' U | '(' F ')'

Structure syntax::

    X ::= F | '(' X ',' X ')' | '(' X '\\\\' X ')' | '(' X '//' X ')' | '<' X '>' | '[' X ']'

UTF-8 aliases accepted on input: ◇ (dia), ■ (box), ⊗ (*), ⇒ (=>).
See FORMATS.md for the file formats.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .calculus import BASE, Limits, NoProofWithinBound, RuleSet, prove
from .fields import Field, field_from_name
from .terms import (
    Atom,
    Box,
    Dia,
    Formula,
    Leaf,
    LRes,
    RRes,
    SBox,
    SDia,
    Sequent,
    SFusion,
    SLRes,
    SRRes,
    Structure,
    Tensor,
)


class ParseError(ValueError):
    def __init__(self, message: str, pos: int | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if pos is not None:
            where.append(f"column {pos + 1}")
        super().__init__(f"{message}" + (f" ({', '.join(where)})" if where else ""))
        self.pos = pos
        self.line = line


_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<arrow>=>|⇒)"
    r"|(?P<slres>\\\\)"
    r"|(?P<srres>//)"
    r"|(?P<op>[*\\/⊗])"
    r"|(?P<punct>[(),<>\[\]])"
    r"|(?P<dia>◇)"
    r"|(?P<box>■)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r")"
)

_KEYWORDS = {"dia", "box"}


@dataclass(frozen=True)
class Tok:
    kind: str
    value: str
    pos: int


def tokenize(text: str) -> list[Tok]:
    toks = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN_RE.match(text, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        kind = m.lastgroup
        val = m.group(kind)
        start = m.start(kind)
        if kind == "op":
            val = "*" if val == "⊗" else val
        elif kind == "dia":
            kind, val = "ident", "dia"
        elif kind == "box":
            kind, val = "ident", "box"
        toks.append(Tok(kind, val, start))
        i = m.end()
    toks.append(Tok("eof", "", n))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Tok | None = None):
        tok = tok or self.tok
        shown = tok.value or "end of input"
        raise ParseError(f"{msg}, found {shown!r}", tok.pos)

    def expect(self, value: str) -> Tok:
        if self.tok.value != value or self.tok.kind == "ident":
            self.error(f"expected {value!r}")
        t = self.tok
        self.i += 1
        return t

    # formulas
    def formula(self) -> Formula:
        left = self.unary()
        if self.tok.kind == "op":
            op = self.tok.value
            self.i += 1
            right = self.unary()
            if self.tok.kind == "op":
                self.error("binary connectives are non-associative; add parentheses")
            return {"*": Tensor, "\\": LRes, "/": RRes}[op](left, right)
        return left

    def unary(self) -> Formula:
        t = self.tok
        if t.kind == "ident":
            self.i += 1
            if t.value == "dia":
                return Dia(self.unary())
            if t.value == "box":
                return Box(self.unary())
            return Atom(t.value)
        if t.value == "(" and t.kind == "punct":
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        self.error("expected a formula")

    # structures
    def structure(self) -> Structure:
        t = self.tok
        if t.kind == "punct" and t.value == "<":
            self.i += 1
            x = self.structure()
            self.expect(">")
            return SDia(x)
        if t.kind == "punct" and t.value == "[":
            self.i += 1
            x = self.structure()
            self.expect("]")
            return SBox(x)
        if t.kind == "punct" and t.value == "(":
            save = self.i
            try:
                self.i += 1
                x = self.structure()
                sep = self.tok
                if sep.value in (",",) or sep.kind in ("slres", "srres"):
                    self.i += 1
                    y = self.structure()
                    self.expect(")")
                    if sep.value == ",":
                        return SFusion(x, y)
                    return SLRes(x, y) if sep.kind == "slres" else SRRes(x, y)
            except ParseError:
                pass
            self.i = save
        return Leaf(self.formula())

    def end(self):
        if self.tok.kind != "eof":
            self.error("unexpected trailing input")


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.end()
    return f


def print_formula(f: Formula) -> str:
    return f.text


def parse_structure(text: str) -> Structure:
    p = _Parser(text)
    x = p.structure()
    p.end()
    return x


def print_structure(x: Structure) -> str:
    return x.text


def parse_sequent(text: str) -> Sequent:
    p = _Parser(text)
    lhs = p.structure()
    if p.tok.kind != "arrow":
        p.error("expected '=>'")
    p.i += 1
    rhs = p.structure()
    p.end()
    return Sequent(lhs, rhs)


def print_sequent(s: Sequent) -> str:
    return s.text


# ------------------------------------------------------------------ lexicon


@dataclass
class Lexicon:
    entries: dict = dc_field(default_factory=dict)  # word -> list of Formula

    def add(self, word: str, f: Formula):
        lst = self.entries.setdefault(word, [])
        if f not in lst:
            lst.append(f)

    def __getitem__(self, word):
        return self.entries[word]

    def __contains__(self, word):
        return word in self.entries

    def __len__(self):
        return len(self.entries)

    def words(self):
        return list(self.entries)


_WORD_RE = re.compile(r"^[^\s:#]+$")


def parse_lexicon(text: str) -> Lexicon:
    """Lines ``word : Formula``; ``#`` starts a comment; blank lines are ignored."""
    lex = Lexicon()
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError("expected 'word : formula'", line=no)
        word, ftext = line.split(":", 1)
        word = word.strip()
        if not _WORD_RE.match(word):
            raise ParseError(f"bad word {word!r}", line=no)
        try:
            f = parse_formula(ftext)
        except ParseError as e:
            raise ParseError(str(e), line=no) from None
        lex.add(word, f)
    return lex


def print_lexicon(lex: Lexicon) -> str:
    return "".join(f"{w} : {f.text}\n" for w, fs in lex.entries.items() for f in fs)


# ---------------------------------------------------------- parse as deduction


def bracketings(n: int):
    """All binary bracketings of ``n`` leaves as nested tuples of indices, in a fixed order."""

    def go(lo, hi):
        if hi - lo == 1:
            yield lo
            return
        for k in range(lo + 1, hi):
            for a in go(lo, k):
                for b in go(k, hi):
                    yield (a, b)

    if n < 1:
        return []
    return list(go(0, n))


def bracketing_text(tree, words) -> str:
    if isinstance(tree, int):
        return words[tree]
    return f"({bracketing_text(tree[0], words)} {bracketing_text(tree[1], words)})"


def _build(tree, cats) -> Structure:
    if isinstance(tree, int):
        return Leaf(cats[tree])
    return SFusion(_build(tree[0], cats), _build(tree[1], cats))


@dataclass
class SentenceAttempt:
    bracketing: tuple | int
    categories: tuple
    sequent: Sequent
    outcome: object  # ProofTree or NoProofWithinBound

    @property
    def proved(self) -> bool:
        return not isinstance(self.outcome, NoProofWithinBound)


def sentence_attempts(words, lex: Lexicon, goal: Formula, rules: RuleSet = BASE, limits: Limits | None = None):
    """Every (bracketing, category assignment) goal sequent with its search outcome."""
    words = list(words)
    for w in words:
        if w not in lex:
            raise KeyError(f"unknown word {w!r}")
    out = []
    for tree in bracketings(len(words)):
        for cats in itertools.product(*(lex[w] for w in words)):
            seq = Sequent(_build(tree, cats), Leaf(goal))
            out.append(SentenceAttempt(tree, cats, seq, prove(seq, rules, limits)))
    return out


def parse_sentence(words, lex: Lexicon, goal: Formula, rules: RuleSet = BASE, limits: Limits | None = None):
    """Successful ``(bracketing, categories, proof)`` triples in deterministic order."""
    return [
        (a.bracketing, a.categories, a.outcome)
        for a in sentence_attempts(words, lex, goal, rules, limits)
        if a.proved
    ]


# -------------------------------------------------------------- model files


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def parse_vector(text: str, field: Field, dim: int | None = None, line: int | None = None) -> tuple:
    parts = [p for p in re.split(r"[,\s]+", text.strip().strip("()")) if p]
    try:
        coords = tuple(field.parse(p) for p in parts)
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"bad scalar in {text!r}: {e}", line=line) from None
    if dim is not None and len(coords) != dim:
        raise ParseError(f"expected {dim} coordinates, got {len(coords)}", line=line)
    return coords


_TERM_RE = re.compile(r"([+-]?)\s*([0-9]+(?:/[0-9]+)?)?\s*\*?\s*([A-Za-z_][A-Za-z0-9_]*)")


def _parse_combination(text: str, names: dict, field: Field, dim: int, line: int) -> list:
    text = text.strip()
    out = [field.zero] * dim
    if text in ("0", ""):
        return out
    pos = 0
    first = True
    compact = text.replace(" ", "")
    while pos < len(compact):
        m = _TERM_RE.match(compact, pos)
        if not m or m.end() == pos or (not first and not m.group(1)):
            raise ParseError(f"cannot read linear combination {text!r}", line=line)
        sign, coef, name = m.groups()
        if name not in names:
            raise ParseError(f"unknown basis element {name!r}", line=line)
        c = Fraction(coef) if coef else Fraction(1)
        if sign == "-":
            c = -c
        k = names[name]
        out[k] = field.add(out[k], field.coerce(c))
        pos = m.end()
        first = False
    return out


def parse_algebra(text: str):
    """Algebra file: ``field``, ``dim``, ``basis`` and product lines ``a * b = c x + d y``."""
    from .kalgebra import KAlgebra

    field = dim = names = None
    products = {}
    for no, line in _lines(text):
        head = line.split(None, 1)[0]
        if head == "field":
            field = field_from_name(line.split(None, 1)[1])
        elif head == "dim":
            dim = int(line.split(None, 1)[1])
        elif head == "basis":
            names = line.split()[1:]
        elif "=" in line:
            if field is None or names is None:
                raise ParseError("field and basis must precede products", line=no)
            lhs, rhs = line.split("=", 1)
            m = re.fullmatch(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*\*\s*([A-Za-z_][A-Za-z0-9_]*)\s*", lhs)
            if not m:
                raise ParseError("expected 'a * b = ...'", line=no)
            idx = {n: i for i, n in enumerate(names)}
            a, b = m.groups()
            if a not in idx or b not in idx:
                raise ParseError(f"unknown basis element in {lhs.strip()!r}", line=no)
            if (idx[a], idx[b]) in products:
                raise ParseError(f"product {a} * {b} given twice", line=no)
            products[(idx[a], idx[b])] = _parse_combination(rhs, idx, field, len(names), no)
        else:
            raise ParseError(f"unrecognised line {line!r}", line=no)
    if field is None or names is None:
        raise ParseError("algebra file needs 'field' and 'basis' lines")
    if dim is None:
        dim = len(names)
    if dim != len(names):
        raise ParseError(f"dim {dim} does not match {len(names)} basis names")
    return KAlgebra.from_products(field, names, products)


def print_algebra(A) -> str:
    lines = [f"field {A.field.name}", f"dim {A.dim}", "basis " + " ".join(A.basis_names)]
    for i in range(A.dim):
        for j in range(A.dim):
            c = A.sc[i][j]
            if any(x != 0 for x in c):
                terms = []
                for k, x in enumerate(c):
                    if x == 0:
                        continue
                    s = str(x)
                    if terms:
                        s = f"- {s[1:]}" if s.startswith("-") else f"+ {s}"
                    terms.append(f"{s} {A.basis_names[k]}")
                lines.append(f"{A.basis_names[i]} * {A.basis_names[j]} = {' '.join(terms)}")
    return "\n".join(lines) + "\n"


def parse_relation(text: str, field: Field | None = None, dim: int | None = None):
    """Relation file: ``relation extensional|functional|graph`` then data lines."""
    from .linalg import Subspace
    from .relations import ModalRelation

    kind = None
    rows = []
    for no, line in _lines(text):
        head = line.split(None, 1)[0]
        if head == "relation":
            kind = line.split(None, 1)[1].strip()
        elif head == "field":
            field = field_from_name(line.split(None, 1)[1])
        elif head == "dim":
            dim = int(line.split(None, 1)[1])
        else:
            rows.append((no, line))
    if kind not in ("extensional", "functional", "graph"):
        raise ParseError(f"relation kind must be extensional, functional or graph, got {kind!r}")
    if field is None:
        raise ParseError("relation needs a field (in the file or from the algebra)")
    if kind == "functional":
        M = [parse_vector(line, field, line=no) for no, line in rows]
        if dim is not None and len(M) != dim:
            raise ParseError(f"functional relation needs {dim} rows")
        return ModalRelation.functional(field, M)
    pairs = []
    for no, line in rows:
        if "->" not in line:
            raise ParseError("expected 'v -> u'", line=no)
        a, b = line.split("->", 1)
        v = parse_vector(a, field, dim, no)
        u = parse_vector(b, field, dim, no)
        if dim is None:
            dim = len(v)
        if len(u) != len(v):
            raise ParseError("pair vectors differ in length", line=no)
        pairs.append((v, u))
    if dim is None:
        raise ParseError("relation needs a dimension")
    if kind == "extensional":
        return ModalRelation.extensional(field, dim, pairs)
    G = Subspace.from_coords(field, 2 * dim, [v + u for v, u in pairs])
    return ModalRelation.graph_subspace(G)


def parse_valuation(text: str, field: Field, dim: int) -> dict:
    """Lines ``atom : v1 ; v2 ; ...`` (generators), ``atom : 0`` or ``atom : full``."""
    from .linalg import Subspace

    val = {}
    for no, line in _lines(text):
        if ":" not in line:
            raise ParseError("expected 'atom : generators'", line=no)
        name, rest = (s.strip() for s in line.split(":", 1))
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name):
            raise ParseError(f"bad atom name {name!r}", line=no)
        if rest == "full":
            val[name] = Subspace.full(field, dim)
        elif rest in ("0", ""):
            val[name] = Subspace.zero(field, dim)
        else:
            gens = [parse_vector(g, field, dim, no) for g in rest.split(";") if g.strip()]
            val[name] = Subspace.from_coords(field, dim, gens)
    return val


def print_valuation(val: dict) -> str:
    out = []
    for k in sorted(val):
        S = val[k]
        if S.is_zero():
            out.append(f"{k} : 0")
        else:
            out.append(f"{k} : " + " ; ".join(",".join(str(c) for c in row) for row in S.basis))
    return "\n".join(out) + "\n"


def _int_rows(rows, n, what, lineno):
    out = []
    for no, line in rows:
        vals = [int(x) for x in re.split(r"[,\s]+", line) if x]
        if len(vals) != n:
            raise ParseError(f"{what} row needs {n} entries", line=no)
        out.append(vals)
    if len(out) != n and what not in ("dia", "box"):
        raise ParseError(f"{what} block needs {n} rows", line=lineno)
    return out


def parse_poset(text: str):
    """Poset file: ``size n`` then blocks ``leq``, ``otimes``, ``lres``, ``rres`` (n rows) and ``dia``, ``box`` (one row)."""
    from .completeness import ModalResiduatedPoset

    n = None
    blocks = {}
    current = None
    starts = {}
    for no, line in _lines(text):
        head = line.split()[0]
        if head == "size":
            n = int(line.split()[1])
        elif head in ("leq", "otimes", "lres", "rres", "dia", "box"):
            current = head
            blocks[current] = []
            starts[current] = no
            rest = line.split(None, 1)[1:] if len(line.split()) > 1 else []
            if rest:
                blocks[current].append((no, rest[0]))
        else:
            if current is None:
                raise ParseError(f"data outside a block: {line!r}", line=no)
            blocks[current].append((no, line))
    if n is None:
        raise ParseError("poset file needs 'size n'")
    missing = [b for b in ("leq", "otimes", "lres", "rres", "dia", "box") if b not in blocks]
    if missing:
        raise ParseError(f"missing blocks: {', '.join(missing)}")
    leq = _int_rows(blocks["leq"], n, "leq", starts["leq"])
    tabs = {k: _int_rows(blocks[k], n, k, starts[k]) for k in ("otimes", "lres", "rres")}
    dia = _int_rows(blocks["dia"], n, "dia", starts["dia"])
    box = _int_rows(blocks["box"], n, "box", starts["box"])
    if len(dia) != 1 or len(box) != 1:
        raise ParseError("dia and box are single rows")
    return ModalResiduatedPoset(
        n=n,
        leq=tuple(tuple(bool(x) for x in r) for r in leq),
        otimes=tuple(map(tuple, tabs["otimes"])),
        lres=tuple(map(tuple, tabs["lres"])),
        rres=tuple(map(tuple, tabs["rres"])),
        dia=tuple(dia[0]),
        box=tuple(box[0]),
    )


def print_poset(P) -> str:
    lines = [f"size {P.n}", "leq"]
    lines += [" ".join(str(int(x)) for x in r) for r in P.leq]
    for name in ("otimes", "lres", "rres"):
        lines.append(name)
        lines += [" ".join(str(x) for x in r) for r in getattr(P, name)]
    lines.append("dia")
    lines.append(" ".join(str(x) for x in P.dia))
    lines.append("box")
    lines.append(" ".join(str(x) for x in P.box))
    return "\n".join(lines) + "\n"
