"""Cut-free backward proof search for D.NL◇ with the analytic rules A◇ and ◇C.

Display postulates are handled by saturating a goal into its display class
(every sequent reachable by postulates alone).  Invertible logical rules are
applied eagerly; the remaining rules are tried on each member of the class
in a fixed order.  A per-branch visited set keyed by the canonical form of
the class stops loops; a global table caches solved classes and failures
that do not depend on the current branch.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .terms import (
    Atom,
    Box,
    Dia,
    Leaf,
    LRes,
    RRes,
    SBox,
    SDia,
    Sequent,
    SFusion,
    SLRes,
    SRRes,
    Tensor,
    is_leaf,
    well_polarized,
)

DEFAULT_DEPTH = 40
DEFAULT_BUDGET = 200_000

# rule names
ID, CUT = "Id", "Cut"
DP_LRES, DP_RRES, DP_DIA = "dp_lres", "dp_rres", "dp_dia"
TENSOR_L, TENSOR_R = "tensorL", "tensorR"
LRES_L, LRES_R = "lresL", "lresR"
RRES_L, RRES_R = "rresL", "rresR"
DIA_L, DIA_R = "diaL", "diaR"
BOX_L, BOX_R = "boxL", "boxR"
A_DIA, DIA_C = "Adia", "diaC"

DISPLAY_RULES = (DP_LRES, DP_RRES, DP_DIA)
RULE_LABELS = {
    ID: "Id",
    CUT: "Cut",
    DP_LRES: "⊗⊣\\",
    DP_RRES: "⊗⊣/",
    DP_DIA: "◇⊣■",
    TENSOR_L: "⊗L",
    TENSOR_R: "⊗R",
    LRES_L: "\\L",
    LRES_R: "\\R",
    RRES_L: "/L",
    RRES_R: "/R",
    DIA_L: "◇L",
    DIA_R: "◇R",
    BOX_L: "■L",
    BOX_R: "■R",
    A_DIA: "A◇",
    DIA_C: "◇C",
}
LATEX_LABELS = {
    ID: r"\mathrm{Id}",
    CUT: r"\mathrm{Cut}",
    DP_LRES: r"\otimes \dashv \backslash",
    DP_RRES: r"\otimes \dashv /",
    DP_DIA: r"\Diamond \dashv \blacksquare",
    TENSOR_L: r"\otimes_L",
    TENSOR_R: r"\otimes_R",
    LRES_L: r"\backslash_L",
    LRES_R: r"\backslash_R",
    RRES_L: r"/_L",
    RRES_R: r"/_R",
    DIA_L: r"\Diamond_L",
    DIA_R: r"\Diamond_R",
    BOX_L: r"\blacksquare_L",
    BOX_R: r"\blacksquare_R",
    A_DIA: r"A\Diamond",
    DIA_C: r"\Diamond C",
}
_LABEL_TO_NAME = {v: k for k, v in RULE_LABELS.items()}


def rule_name(label: str) -> str:
    """Accept either the internal name or the symbolic label of a rule."""
    if label in RULE_LABELS:
        return label
    if label in _LABEL_TO_NAME:
        return _LABEL_TO_NAME[label]
    raise ValueError(f"unknown rule {label!r}")


@dataclass(frozen=True)
class RuleSet:
    enable_A_dia: bool = False
    enable_dia_C: bool = False

    def describe(self) -> str:
        on = [n for n, f in (("A◇", self.enable_A_dia), ("◇C", self.enable_dia_C)) if f]
        return "base" + ("+" + "+".join(on) if on else "")


BASE = RuleSet()


@dataclass(frozen=True)
class Limits:
    depth: int = DEFAULT_DEPTH
    node_budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.depth <= 0 or self.node_budget <= 0:
            raise ValueError("limits must be positive")


@dataclass(frozen=True)
class ProofTree:
    conclusion: Sequent
    rule: str
    premises: tuple = ()

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def count(self, pred=None) -> int:
        here = 1 if pred is None or pred(self) else 0
        return here + sum(p.count(pred) for p in self.premises)

    def inferences(self, include_display: bool = True) -> int:
        """Number of non-axiom rule applications."""
        return self.count(lambda t: t.rule != ID and (include_display or t.rule not in DISPLAY_RULES))

    def rules_used(self) -> set:
        out = {self.rule}
        for p in self.premises:
            out |= p.rules_used()
        return out

    def depth(self) -> int:
        return 1 + max((p.depth() for p in self.premises), default=0)


@dataclass(frozen=True)
class NoProofWithinBound:
    """Search ended without a proof.

    ``exhausted`` is True when neither the depth limit nor the node budget cut
    off any branch, so the sequent is not derivable with the given rules.
    """

    sequent: Sequent
    exhausted: bool
    budget_hit: bool
    depth_cut: bool
    nodes: int

    def __bool__(self):
        return False

    @property
    def status(self) -> str:
        if self.exhausted:
            return "exhausted"
        return "budget" if self.budget_hit else "depth"


# ------------------------------------------------------------- postulates


def display_neighbours(seq: Sequent):
    """All ``(rule, sequent)`` one display postulate away (either direction)."""
    L, R = seq.lhs, seq.rhs
    if isinstance(L, SFusion):
        yield DP_LRES, Sequent(L.right, SLRes(L.left, R))
        yield DP_RRES, Sequent(L.left, SRRes(R, L.right))
    if isinstance(R, SLRes):
        yield DP_LRES, Sequent(SFusion(R.left, L), R.right)
    if isinstance(R, SRRes):
        yield DP_RRES, Sequent(SFusion(L, R.right), R.left)
    if isinstance(L, SDia):
        yield DP_DIA, Sequent(L.body, SBox(R))
    if isinstance(R, SBox):
        yield DP_DIA, Sequent(SDia(L), R.body)


def apply_postulate(seq: Sequent, name: str, inverse: bool = False) -> Sequent | None:
    """Rewrite by one postulate; forward moves a part of the left side to the right."""
    L, R = seq.lhs, seq.rhs
    if name == DP_LRES:
        if not inverse and isinstance(L, SFusion):
            return Sequent(L.right, SLRes(L.left, R))
        if inverse and isinstance(R, SLRes):
            return Sequent(SFusion(R.left, L), R.right)
    elif name == DP_RRES:
        if not inverse and isinstance(L, SFusion):
            return Sequent(L.left, SRRes(R, L.right))
        if inverse and isinstance(R, SRRes):
            return Sequent(SFusion(L, R.right), R.left)
    elif name == DP_DIA:
        if not inverse and isinstance(L, SDia):
            return Sequent(L.body, SBox(R))
        if inverse and isinstance(R, SBox):
            return Sequent(SDia(L), R.body)
    else:
        raise ValueError(f"{name!r} is not a display postulate")
    return None


def display_class(seq: Sequent) -> dict:
    """BFS over display postulates from ``seq``: member -> (parent, rule), in discovery order."""
    parent = {seq: (None, None)}
    queue = deque([seq])
    while queue:
        s = queue.popleft()
        for rule, t in display_neighbours(s):
            if t not in parent:
                parent[t] = (s, rule)
                queue.append(t)
    return parent


def _class_key(members) -> str:
    return min((len(m.rhs.text), m.text) for m in members)[1]


def canonical_form(seq: Sequent) -> str:
    """Key shared by exactly the sequents inter-derivable by display postulates.

    The representative is the member with the shortest right-hand side
    (ties broken by the printed form), so as much as possible sits on the
    left under fusion and structural diamond.
    """
    return _class_key(display_class(seq))


def display_path(start: Sequent, target: Sequent, parent=None):
    """Postulate steps ``[(rule, next_sequent), ...]`` leading from ``start`` to ``target``."""
    parent = parent or display_class(start)
    if target not in parent:
        raise ValueError("target is not display-equivalent to start")
    steps = []
    s = target
    while s != start:
        prev, rule = parent[s]
        steps.append((rule, s))
        s = prev
    steps.reverse()
    return steps


def _wrap(start: Sequent, proof: ProofTree, parent=None) -> ProofTree:
    """Prefix ``proof`` with the display steps that turn ``start`` into its conclusion."""
    if proof.conclusion == start:
        return proof
    steps = display_path(start, proof.conclusion, parent)
    node = proof
    seqs = [start] + [s for _, s in steps[:-1]]
    for (rule, _), conc in zip(reversed(steps), reversed(seqs)):
        node = ProofTree(conc, rule, (node,))
    return node


# --------------------------------------------------------- rule instances


def _invertible(m: Sequent):
    """Premise of an invertible rule whose conclusion is ``m``, or None."""
    L, R = m.lhs, m.rhs
    if is_leaf(L, Tensor):
        f = L.formula
        return TENSOR_L, Sequent(SFusion(Leaf(f.left), Leaf(f.right)), R)
    if is_leaf(L, Dia):
        return DIA_L, Sequent(SDia(Leaf(L.formula.body)), R)
    if is_leaf(R, LRes):
        f = R.formula
        return LRES_R, Sequent(L, SLRes(Leaf(f.left), Leaf(f.right)))
    if is_leaf(R, RRes):
        f = R.formula
        return RRES_R, Sequent(L, SRRes(Leaf(f.left), Leaf(f.right)))
    if is_leaf(R, Box):
        return BOX_R, Sequent(L, SBox(Leaf(R.formula.body)))
    return None


def _branching(m: Sequent, rules: RuleSet):
    """Non-invertible rule instances ``(rule, premises)`` concluding ``m``, in priority order."""
    L, R = m.lhs, m.rhs
    out = []
    if isinstance(L, SFusion) and is_leaf(R, Tensor):
        out.append((TENSOR_R, (Sequent(L.left, Leaf(R.formula.left)), Sequent(L.right, Leaf(R.formula.right)))))
    if is_leaf(L, LRes) and isinstance(R, SLRes):
        f = L.formula
        out.append((LRES_L, (Sequent(R.left, Leaf(f.left)), Sequent(Leaf(f.right), R.right))))
    if is_leaf(L, RRes) and isinstance(R, SRRes):
        f = L.formula
        out.append((RRES_L, (Sequent(Leaf(f.left), R.left), Sequent(R.right, Leaf(f.right)))))
    if isinstance(L, SDia) and is_leaf(R, Dia):
        out.append((DIA_R, (Sequent(L.body, Leaf(R.formula.body)),)))
    if is_leaf(L, Box) and isinstance(R, SBox):
        out.append((BOX_L, (Sequent(Leaf(L.formula.body), R.body),)))
    if rules.enable_A_dia:
        p = a_dia_premise(m)
        if p is not None:
            out.append((A_DIA, (p,)))
    if rules.enable_dia_C:
        p = dia_c_premise(m)
        if p is not None:
            out.append((DIA_C, (p,)))
    return out


def a_dia_premise(m: Sequent):
    """``(X , Y) , <Z> => W``  from  ``X , (Y , <Z>) => W``."""
    L = m.lhs
    if isinstance(L, SFusion) and isinstance(L.left, SFusion) and isinstance(L.right, SDia):
        X, Y, DZ = L.left.left, L.left.right, L.right
        return Sequent(SFusion(X, SFusion(Y, DZ)), m.rhs)
    return None


def dia_c_premise(m: Sequent):
    """``(X , Z) , <Y> => W``  from  ``(X , <Y>) , Z => W``."""
    L = m.lhs
    if isinstance(L, SFusion) and isinstance(L.left, SFusion) and isinstance(L.right, SDia):
        X, Z, DY = L.left.left, L.left.right, L.right
        return Sequent(SFusion(SFusion(X, DY), Z), m.rhs)
    return None


def _is_id(m: Sequent) -> bool:
    return is_leaf(m.lhs, Atom) and m.lhs == m.rhs


# ------------------------------------------------------------------ search


class _Search:
    def __init__(self, rules: RuleSet, limits: Limits):
        self.rules = rules
        self.limits = limits
        self.nodes = 0
        self.budget_hit = False
        self.depth_cut = False
        self.cuts = 0
        self.classes = {}  # sequent -> (members tuple, key)
        self.solved = {}  # key -> ProofTree (conclusion is a class member)
        self.failed = set()  # keys whose failure does not depend on the branch

    def klass(self, seq: Sequent):
        hit = self.classes.get(seq)
        if hit is None:
            parent = display_class(seq)
            members = tuple(parent)
            key = _class_key(members)
            hit = (members, key)
            for m in members:
                self.classes.setdefault(m, hit)
            # BFS order must start at the goal itself for determinism
            self.classes[seq] = hit
        return hit

    def run(self, seq: Sequent):
        proof, _ = self.search(seq, 0, {})
        return proof

    def search(self, seq: Sequent, level: int, path: dict):
        """Returns ``(proof_or_None, low)``; ``low`` is the shallowest path level hit by a loop."""
        members, key = self.klass(seq)
        if key in self.solved:
            return _wrap(seq, self.solved[key]), None
        if key in self.failed:
            return None, None
        if key in path:
            return None, path[key]
        if self.nodes >= self.limits.node_budget:
            self.budget_hit = True
            self.cuts += 1
            return None, None
        if level >= self.limits.depth:
            self.depth_cut = True
            self.cuts += 1
            return None, None
        self.nodes += 1
        members = tuple(display_class(seq)) if members[0] != seq else members
        cuts_before = self.cuts
        path[key] = level
        try:
            proof, low = self._expand(seq, members, level, path)
        finally:
            del path[key]
        if proof is not None:
            self.solved[key] = proof
            return _wrap(seq, proof), None
        if self.cuts == cuts_before and (low is None or low >= level):
            self.failed.add(key)
        if low is not None and low >= level:
            low = None
        return None, low

    def _expand(self, seq, members, level, path):
        low = None

        def merge(a, b):
            if a is None:
                return b
            if b is None:
                return a
            return min(a, b)

        for m in members:
            if _is_id(m):
                return ProofTree(m, ID), None
        for m in members:
            inv = _invertible(m)
            if inv is not None:
                rule, prem = inv
                sub, l = self.search(prem, level + 1, path)
                if sub is None:
                    return None, l
                return ProofTree(m, rule, (sub,)), None
        for m in members:
            for rule, prems in _branching(m, self.rules):
                subs = []
                for p in prems:
                    sub, l = self.search(p, level + 1, path)
                    low = merge(low, l)
                    if sub is None:
                        break
                    subs.append(sub)
                else:
                    return ProofTree(m, rule, tuple(subs)), None
                if self.budget_hit:
                    return None, low
        return None, low


def prove(seq: Sequent, rules: RuleSet = BASE, limits: Limits | None = None):
    """Backward search; returns a ProofTree or a falsy NoProofWithinBound."""
    limits = limits or Limits()
    if not well_polarized(seq):
        raise ValueError(f"sequent is not well polarized: {seq}")
    s = _Search(rules, limits)
    proof = s.run(seq)
    if proof is not None:
        return proof
    return NoProofWithinBound(
        seq,
        exhausted=not (s.budget_hit or s.depth_cut),
        budget_hit=s.budget_hit,
        depth_cut=s.depth_cut,
        nodes=s.nodes,
    )


# ---------------------------------------------------------------- checking


def _expected_premises(t: ProofTree):
    """The premise list the rule schema demands for ``t``'s conclusion, or None."""
    m = t.conclusion
    L, R = m.lhs, m.rhs
    r = t.rule
    if r == ID:
        return () if _is_id(m) else None
    if r == TENSOR_L:
        if is_leaf(L, Tensor):
            return (Sequent(SFusion(Leaf(L.formula.left), Leaf(L.formula.right)), R),)
    elif r == DIA_L:
        if is_leaf(L, Dia):
            return (Sequent(SDia(Leaf(L.formula.body)), R),)
    elif r == LRES_R:
        if is_leaf(R, LRes):
            return (Sequent(L, SLRes(Leaf(R.formula.left), Leaf(R.formula.right))),)
    elif r == RRES_R:
        if is_leaf(R, RRes):
            return (Sequent(L, SRRes(Leaf(R.formula.left), Leaf(R.formula.right))),)
    elif r == BOX_R:
        if is_leaf(R, Box):
            return (Sequent(L, SBox(Leaf(R.formula.body))),)
    elif r == TENSOR_R:
        if isinstance(L, SFusion) and is_leaf(R, Tensor):
            return (Sequent(L.left, Leaf(R.formula.left)), Sequent(L.right, Leaf(R.formula.right)))
    elif r == LRES_L:
        if is_leaf(L, LRes) and isinstance(R, SLRes):
            return (Sequent(R.left, Leaf(L.formula.left)), Sequent(Leaf(L.formula.right), R.right))
    elif r == RRES_L:
        if is_leaf(L, RRes) and isinstance(R, SRRes):
            return (Sequent(Leaf(L.formula.left), R.left), Sequent(R.right, Leaf(L.formula.right)))
    elif r == DIA_R:
        if isinstance(L, SDia) and is_leaf(R, Dia):
            return (Sequent(L.body, Leaf(R.formula.body)),)
    elif r == BOX_L:
        if is_leaf(L, Box) and isinstance(R, SBox):
            return (Sequent(Leaf(L.formula.body), R.body),)
    elif r == A_DIA:
        p = a_dia_premise(m)
        return None if p is None else (p,)
    elif r == DIA_C:
        p = dia_c_premise(m)
        return None if p is None else (p,)
    return None


def _check_node(t: ProofTree, allowed) -> bool:
    if allowed is not None and t.rule not in allowed and t.rule not in DISPLAY_RULES and t.rule != ID:
        return False
    if t.rule in DISPLAY_RULES:
        if len(t.premises) != 1:
            return False
        p = t.premises[0].conclusion
        return p in (apply_postulate(t.conclusion, t.rule), apply_postulate(t.conclusion, t.rule, inverse=True))
    if t.rule == CUT:
        if len(t.premises) != 2:
            return False
        a, b = t.premises[0].conclusion, t.premises[1].conclusion
        return (
            isinstance(a.rhs, Leaf)
            and a.rhs == b.lhs
            and a.lhs == t.conclusion.lhs
            and b.rhs == t.conclusion.rhs
        )
    exp = _expected_premises(t)
    if exp is None:
        return False
    return tuple(p.conclusion for p in t.premises) == exp


def check_proof(t: ProofTree, allowed_rules=None) -> bool:
    """True iff every node instantiates its rule schema (premise order matters).

    ``allowed_rules`` optionally restricts the non-display rules that may
    occur (Id and display postulates are always allowed); Cut is accepted
    when present in the tree unless excluded this way.
    """
    allowed = None if allowed_rules is None else {rule_name(r) for r in allowed_rules}
    stack = [t]
    while stack:
        node = stack.pop()
        if not isinstance(node, ProofTree) or not _check_node(node, allowed):
            return False
        stack.extend(node.premises)
    return True


def rules_for(rules: RuleSet) -> set:
    base = {TENSOR_L, TENSOR_R, LRES_L, LRES_R, RRES_L, RRES_R, DIA_L, DIA_R, BOX_L, BOX_R}
    if rules.enable_A_dia:
        base.add(A_DIA)
    if rules.enable_dia_C:
        base.add(DIA_C)
    return base


# -------------------------------------------------------------- rendering

_LATEX_STRUCT = {
    SFusion: r"\hat{\otimes}",
    SLRes: r"\check{\backslash}",
    SRRes: r"\check{/}",
}


def latex_formula(f) -> str:
    if isinstance(f, Atom):
        return r"\mathit{" + f.name + "}" if len(f.name) > 1 else f.name
    if isinstance(f, (Dia, Box)):
        op = r"\Diamond " if isinstance(f, Dia) else r"\blacksquare "
        b = latex_formula(f.body)
        return op + (f"({b})" if f.body.arity == 2 else b)
    op = {Tensor: r"\otimes", LRes: r"\backslash", RRes: "/"}[type(f)]
    a, b = latex_formula(f.left), latex_formula(f.right)
    if f.left.arity == 2:
        a = f"({a})"
    if f.right.arity == 2:
        b = f"({b})"
    return f"{a} {op} {b}"


def latex_structure(x, top: bool = True) -> str:
    if isinstance(x, Leaf):
        return latex_formula(x.formula)
    if isinstance(x, SDia):
        return r"\hat{\Diamond} " + latex_structure(x.body, False)
    if isinstance(x, SBox):
        return r"\check{\blacksquare} " + latex_structure(x.body, False)
    body = f"{latex_structure(x.left, False)} {_LATEX_STRUCT[type(x)]} {latex_structure(x.right, False)}"
    return body if top else f"({body})"


def latex_sequent(s: Sequent) -> str:
    return f"{latex_structure(s.lhs)} \\Rightarrow {latex_structure(s.rhs)}"


def export_latex(t: ProofTree) -> str:
    """bussproofs source for the tree (wrap in ``\\begin{prooftree}``)."""
    lines = [r"\begin{prooftree}"]

    def emit(node: ProofTree):
        for p in node.premises:
            emit(p)
        if node.rule == ID:
            lines.append(r"\AxiomC{}")
            lines.append(r"\RightLabel{\scriptsize $" + LATEX_LABELS[ID] + "$}")
            lines.append(r"\UnaryInfC{$" + latex_sequent(node.conclusion) + "$}")
            return
        cmd = {1: r"\UnaryInfC", 2: r"\BinaryInfC"}[len(node.premises)]
        lines.append(r"\RightLabel{\scriptsize $" + LATEX_LABELS[node.rule] + "$}")
        lines.append(cmd + "{$" + latex_sequent(node.conclusion) + "$}")

    emit(t)
    lines.append(r"\end{prooftree}")
    return "\n".join(lines) + "\n"


def render_text(t: ProofTree, indent: int = 0) -> str:
    """Indented text rendering, conclusion first."""
    out = []

    def walk(node, d):
        out.append("  " * d + f"{node.conclusion}    [{RULE_LABELS.get(node.rule, node.rule)}]")
        for p in node.premises:
            walk(p, d + 1)

    walk(t, indent)
    return "\n".join(out)


def proof_to_json(t: ProofTree) -> dict:
    return {
        "conclusion": t.conclusion.text,
        "rule": t.rule,
        "premises": [proof_to_json(p) for p in t.premises],
    }
