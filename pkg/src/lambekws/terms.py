"""Formulas, structures and sequents of the modal non-associative Lambek calculus.

Nodes are immutable; equality and hashing go through the printed form, which
is cached on first use.
"""

from __future__ import annotations

from functools import cached_property


class Term:
    @cached_property
    def text(self) -> str:
        return self._render()

    def __str__(self):
        return self.text

    def __repr__(self):
        return f"{type(self).__name__}({self.text!r})"

    def __eq__(self, other):
        return type(self) is type(other) and self.text == other.text

    def __hash__(self):
        return hash((type(self).__name__, self.text))

    @cached_property
    def size(self) -> int:
        return 1 + sum(c.size for c in self.children)

    children: tuple = ()


# ----------------------------------------------------------------- formulas


class Formula(Term):
    arity = 0
    symbol = ""

    def atoms(self) -> set:
        out = set()
        stack = [self]
        while stack:
            f = stack.pop()
            if isinstance(f, Atom):
                out.add(f.name)
            stack.extend(f.children)
        return out


class Atom(Formula):
    def __init__(self, name: str):
        self.name = name

    def _render(self):
        return self.name


class _Unary(Formula):
    arity = 1
    keyword = ""

    def __init__(self, body: Formula):
        self.body = body
        self.children = (body,)

    def _render(self):
        b = self.body.text
        if self.body.arity == 2:
            b = f"({b})"
        return f"{self.keyword} {b}"


class _Binary(Formula):
    arity = 2

    def __init__(self, left: Formula, right: Formula):
        self.left = left
        self.right = right
        self.children = (left, right)

    def _render(self):
        a, b = self.left.text, self.right.text
        if self.left.arity == 2:
            a = f"({a})"
        if self.right.arity == 2:
            b = f"({b})"
        return f"{a}{self.symbol}{b}"


class Tensor(_Binary):
    symbol = "*"


class LRes(_Binary):
    """``left \\ right``: looks for ``left`` on its left."""

    symbol = "\\"


class RRes(_Binary):
    """``left / right``: looks for ``right`` on its right."""

    symbol = "/"


class Dia(_Unary):
    keyword = "dia"


class Box(_Unary):
    keyword = "box"


# --------------------------------------------------------------- structures


class Structure(Term):
    def leaves(self) -> list:
        if isinstance(self, Leaf):
            return [self.formula]
        return [f for c in self.children for f in c.leaves()]

    def atoms(self) -> set:
        out = set()
        for f in self.leaves():
            out |= f.atoms()
        return out


class Leaf(Structure):
    def __init__(self, formula: Formula):
        self.formula = formula

    def _render(self):
        return self.formula.text


class SFusion(Structure):
    """Structural fusion ``(X , Y)``."""

    def __init__(self, left: Structure, right: Structure):
        self.left, self.right = left, right
        self.children = (left, right)

    def _render(self):
        return f"({self.left.text} , {self.right.text})"


class SLRes(Structure):
    """Structural left residual ``(X \\\\ Y)``."""

    def __init__(self, left: Structure, right: Structure):
        self.left, self.right = left, right
        self.children = (left, right)

    def _render(self):
        return f"({self.left.text} \\\\ {self.right.text})"


class SRRes(Structure):
    """Structural right residual ``(X // Y)``."""

    def __init__(self, left: Structure, right: Structure):
        self.left, self.right = left, right
        self.children = (left, right)

    def _render(self):
        return f"({self.left.text} // {self.right.text})"


class SDia(Structure):
    """Structural diamond ``<X>``."""

    def __init__(self, body: Structure):
        self.body = body
        self.children = (body,)

    def _render(self):
        return f"<{self.body.text}>"


class SBox(Structure):
    """Structural box ``[X]``."""

    def __init__(self, body: Structure):
        self.body = body
        self.children = (body,)

    def _render(self):
        return f"[{self.body.text}]"


def as_structure(x) -> Structure:
    return x if isinstance(x, Structure) else Leaf(x)


def is_leaf(x: Structure, kind=None) -> bool:
    return isinstance(x, Leaf) and (kind is None or isinstance(x.formula, kind))


class Sequent:
    __slots__ = ("lhs", "rhs", "_text", "_hash")

    def __init__(self, lhs, rhs):
        self.lhs = as_structure(lhs)
        self.rhs = as_structure(rhs)
        self._text = f"{self.lhs.text} => {self.rhs.text}"
        self._hash = hash(self._text)

    @property
    def text(self) -> str:
        return self._text

    def __str__(self):
        return self._text

    def __repr__(self):
        return f"Sequent({self._text!r})"

    def __eq__(self, other):
        return isinstance(other, Sequent) and self._text == other._text

    def __hash__(self):
        return self._hash

    def atoms(self) -> set:
        return self.lhs.atoms() | self.rhs.atoms()


def is_antecedent(x: Structure) -> bool:
    """Built from formulas with structural fusion and structural diamond."""
    if isinstance(x, Leaf):
        return True
    if isinstance(x, SFusion):
        return is_antecedent(x.left) and is_antecedent(x.right)
    if isinstance(x, SDia):
        return is_antecedent(x.body)
    return False


def is_succedent(x: Structure) -> bool:
    if isinstance(x, Leaf):
        return True
    if isinstance(x, SLRes):
        return is_antecedent(x.left) and is_succedent(x.right)
    if isinstance(x, SRRes):
        return is_succedent(x.left) and is_antecedent(x.right)
    if isinstance(x, SBox):
        return is_succedent(x.body)
    return False


def well_polarized(seq: Sequent) -> bool:
    """Left side uses fusion and structural diamond; right side uses the residuals and structural box."""
    return is_antecedent(seq.lhs) and is_succedent(seq.rhs)


def formula_to_antecedent(f: Formula) -> Structure:
    """Structural image of a formula in antecedent position (fusion and diamond become structural)."""
    if isinstance(f, Tensor):
        return SFusion(formula_to_antecedent(f.left), formula_to_antecedent(f.right))
    if isinstance(f, Dia):
        return SDia(formula_to_antecedent(f.body))
    return Leaf(f)


def fuse(structs) -> Structure:
    """Right-nested fusion of a nonempty list of structures."""
    structs = [as_structure(s) for s in structs]
    out = structs[-1]
    for s in reversed(structs[:-1]):
        out = SFusion(s, out)
    return out
