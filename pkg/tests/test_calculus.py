import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lambekws.calculus import (
    A_DIA,
    BOX_L,
    DIA_C,
    DIA_L,
    DP_DIA,
    DP_LRES,
    DP_RRES,
    ID,
    LRES_L,
    RRES_L,
    RRES_R,
    TENSOR_R,
    Limits,
    NoProofWithinBound,
    ProofTree,
    RuleSet,
    apply_postulate,
    canonical_form,
    check_proof,
    export_latex,
    prove,
    proof_to_json,
    render_text,
    rule_name,
)
from lambekws.complex_algebra import holds, random_subspace
from lambekws.fields import F2
from lambekws.kalgebra import random_algebra
from lambekws.relations import random_valid_relations
from lambekws.syntax import parse_sequent
from lambekws.terms import Atom, Box, Dia, LRes, RRes, Tensor

ADIA = RuleSet(enable_A_dia=True)
BOTH = RuleSet(enable_A_dia=True, enable_dia_C=True)

KEY = r"(n , ((n\n)/(s/dia box np) , (np , (np\s)/np))) => n"
KEY_THERE = r"(n , ((n\n)/(s/dia box np) , (np , ((np\s)/np , (np\s)\(np\s))))) => n"


def T(seq, rule, *prems):
    return ProofTree(parse_sequent(seq), rule, tuple(prems))


def ax(a):
    return T(f"{a} => {a}", ID)


def hand_first_derivation():
    """The extraction derivation for ``key that Alice found``, node by node."""
    found = r"(np , (np\s)/np)"
    n_n = T(r"n\n => (n \\ n)", LRES_L, ax("n"), ax("n"))
    np_s = T(r"np\s => (np \\ s)", LRES_L, ax("np"), ax("s"))
    gap = T("<box np> => np", DP_DIA, T("box np => [np]", BOX_L, ax("np")))
    fnd = T(r"(np\s)/np => ((np \\ s) // <box np>)", RRES_L, np_s, gap)
    t = T(r"((np\s)/np , <box np>) => (np \\ s)", DP_RRES, fnd)
    t = T(rf"(np , ((np\s)/np , <box np>)) => s", DP_LRES, t)
    t = T(rf"({found} , <box np>) => s", A_DIA, t)
    t = T(rf"<box np> => ({found} \\ s)", DP_LRES, t)
    t = T(rf"dia box np => ({found} \\ s)", DIA_L, t)
    t = T(rf"({found} , dia box np) => s", DP_LRES, t)
    t = T(rf"{found} => (s // dia box np)", DP_RRES, t)
    t = T(rf"{found} => s/dia box np", RRES_R, t)
    t = T(rf"(n\n)/(s/dia box np) => ((n \\ n) // {found})", RRES_L, n_n, t)
    t = T(rf"((n\n)/(s/dia box np) , {found}) => (n \\ n)", DP_RRES, t)
    return T(KEY, DP_LRES, t)


def test_identity():
    p = prove(parse_sequent("p => p"))
    assert isinstance(p, ProofTree) and p.rule == ID and p.size() == 1
    assert check_proof(p)


def test_p_q_exhausted():
    r = prove(parse_sequent("p => q"))
    assert isinstance(r, NoProofWithinBound) and not r and r.exhausted and r.status == "exhausted"


def test_hand_transcribed_derivation_checks():
    t = hand_first_derivation()
    assert check_proof(t)
    assert t.inferences() == 16
    assert check_proof(t, allowed_rules=["A◇"] + ["\\L", "/L", "/R", "◇L", "■L"])
    assert not check_proof(t, allowed_rules=["\\L", "/L", "/R", "◇L", "■L"])


def test_swapped_premises_rejected():
    good = T("(p , q) => p*q", TENSOR_R, ax("p"), ax("q"))
    assert check_proof(good)
    assert not check_proof(T("(p , q) => p*q", TENSOR_R, ax("q"), ax("p")))
    assert not check_proof(T("p => q", ID))


def test_first_extraction():
    seq = parse_sequent(KEY)
    proof = prove(seq, ADIA, Limits(depth=40))
    assert isinstance(proof, ProofTree) and check_proof(proof)
    assert A_DIA in proof.rules_used() and DIA_C not in proof.rules_used()
    base = prove(seq, RuleSet(), Limits(depth=40))
    assert not base and base.exhausted


def test_second_extraction():
    seq = parse_sequent(KEY_THERE)
    proof = prove(seq, BOTH)
    assert isinstance(proof, ProofTree) and check_proof(proof)
    assert {A_DIA, DIA_C} <= proof.rules_used()
    assert not prove(seq, ADIA)


def test_search_deterministic():
    seq = parse_sequent(KEY)
    a, b = prove(seq, ADIA), prove(seq, ADIA)
    assert a == b and export_latex(a) == export_latex(b)


def test_structural_gating():
    seq = parse_sequent("(p , q) , <r> => p * (q * dia r)".replace("(p , q) , <r>", "((p , q) , <r>)"))
    off = prove(seq)
    assert not off and off.exhausted
    assert check_proof(prove(seq, ADIA))


def test_display_postulates_involutive():
    s = parse_sequent("((p , q) , <r>) => s")
    for rule in (DP_LRES, DP_RRES):
        t = apply_postulate(s, rule)
        assert apply_postulate(t, rule, inverse=True) == s
    d = parse_sequent("<p> => q")
    assert apply_postulate(apply_postulate(d, DP_DIA), DP_DIA, inverse=True) == d
    assert apply_postulate(d, DP_LRES) is None


def test_canonical_form_shared_by_display_class():
    assert canonical_form(parse_sequent("(x , y) => z")) == canonical_form(parse_sequent("x => (z // y)"))
    assert canonical_form(parse_sequent("(x , y) => z")) == canonical_form(parse_sequent(r"y => (x \\ z)"))
    assert canonical_form(parse_sequent("<x> => y")) == canonical_form(parse_sequent("x => [y]"))
    assert canonical_form(parse_sequent("p => p")) == "p => p"
    assert canonical_form(parse_sequent("p => q")) != canonical_form(parse_sequent("q => p"))


def test_budget_reports_inconclusive():
    r = prove(parse_sequent(KEY_THERE), BOTH, Limits(node_budget=5))
    assert not r and r.budget_hit and not r.exhausted and r.status == "budget"


def test_rendering():
    t = hand_first_derivation()
    tex = export_latex(t)
    assert tex.startswith(r"\begin{prooftree}") and tex.count(r"\AxiomC{}") == 5
    assert r"A\Diamond" in tex
    assert render_text(t).splitlines()[0].startswith("(n , ")
    j = proof_to_json(t)
    assert j["rule"] == DP_LRES and len(j["premises"]) == 1


def test_rule_names():
    assert rule_name("A◇") == A_DIA and rule_name(DIA_C) == DIA_C
    with pytest.raises(ValueError):
        rule_name("bogus")


def test_ill_polarized_rejected():
    with pytest.raises(ValueError):
        prove(parse_sequent("[p] => p"))


# ------------------------------------------------------------ soundness


def formulas(depth):
    atoms = st.sampled_from([Atom("p"), Atom("q")])
    if depth == 0:
        return atoms
    sub = formulas(depth - 1)
    return st.one_of(
        atoms,
        st.builds(Tensor, sub, sub),
        st.builds(LRes, sub, sub),
        st.builds(RRes, sub, sub),
        st.builds(Dia, sub),
        st.builds(Box, sub),
    )


_models = None


def models():
    global _models
    if _models is None:
        rng = np.random.default_rng(7)
        out = []
        for i in range(20):
            d = 2 + i % 3
            A = random_algebra(F2, d, 1000 + i)
            R = random_valid_relations(F2, d, 1, seed=i)[0]
            out.append((A, R, {"p": random_subspace(A, rng), "q": random_subspace(A, rng)}))
        _models = out
    return _models


@given(formulas(2), formulas(2))
def test_soundness_bridge(a, b):
    from lambekws.terms import Sequent

    seq = Sequent(a, b)
    proof = prove(seq, RuleSet(), Limits(depth=20, node_budget=3000))
    if isinstance(proof, ProofTree):
        assert check_proof(proof)
        for A, R, val in models():
            assert holds(A, R, val, seq)


@pytest.mark.parametrize(
    "text",
    ["p => p", r"p => (q/p)\q", r"p*(p\q) => q", "dia box p => p", "p => box dia p", r"(q/p)*p => q"],
)
def test_known_theorems_sound(text):
    seq = parse_sequent(text)
    assert check_proof(prove(seq))
    for A, R, val in models():
        assert holds(A, R, val, seq)
