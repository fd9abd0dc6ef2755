import re

import pytest

from mautomata.automata import RunBounds, det_accepts, language_agreement, pruned_agreement, run_nondeterministic
from mautomata.data import path
from mautomata.formats import load_pda
from mautomata.gallery import (
    BRACKETS,
    DEMOS,
    BracketStepper,
    GalleryError,
    PDAStepper,
    PDATransition,
    PushdownAutomaton,
    anbn_pda,
    balanced,
    default_label_set,
    demo,
    dyck_automaton,
    dyck_pda,
    integers_oracle,
    iter_candidates,
    make_counter_automaton,
    pda_to_polycyclic,
    polycyclic_refuter,
    simulate_pda,
)
from mautomata.groups import InvolutiveAlphabet, enumerate_words
from mautomata.monoids import FreeAbelian, Polycyclic, PolycyclicElement

ANBN = re.compile(r"(a*)(b*)")


def is_anbn(w):
    m = ANBN.fullmatch("".join(w))
    return bool(m) and len(m.group(1)) == len(m.group(2))


def linear_bracket_check(w, pairs):
    opening = {o: c for o, c in pairs}
    stack = []
    for x in w:
        if x in opening:
            stack.append(opening[x])
        elif not stack or stack.pop() != x:
            return False
    return not stack


def test_counter_z():
    A = make_counter_automaton(1, {"a": (1,), "A": (-1,)})
    assert A.deterministic
    report = language_agreement(A, lambda w: w.count("a") == w.count("A"), 12)
    assert report.ok and report.total == 2**13 - 1


def test_counter_z2():
    A = make_counter_automaton(2, {"a": (1, 0), "A": (-1, 0), "b": (0, 1), "B": (0, -1)})
    report = language_agreement(A, lambda w: w.count("a") == w.count("A") and w.count("b") == w.count("B"), 7)
    assert report.ok


def test_counter_without_edges_accepts_only_empty_word():
    A = make_counter_automaton(1, [], alphabet=InvolutiveAlphabet.symmetric("a"))
    words = [w for w in enumerate_words(A.alphabet, 4) if det_accepts(A, w)]
    assert words == [()]


def test_counter_dimension_mismatch():
    with pytest.raises(GalleryError):
        make_counter_automaton(2, {"a": (1,), "A": (-1,)})


def test_counter_nondeterministic_spec():
    A = make_counter_automaton(1, [(0, (1,), "a", 0), (0, (-1,), "a", 0), (0, (0,), "A", 0)])
    assert not A.deterministic
    assert run_nondeterministic(A, "aa").accepted


def test_anbn_image():
    P = anbn_pda()
    A = pda_to_polycyclic(P)
    assert A.monoid == Polycyclic(1)
    report = language_agreement(A, is_anbn, 12, mode="nondet", bounds=RunBounds(max_register_size=16))
    assert report.ok


def test_simulator_is_an_independent_check():
    P = anbn_pda()
    for w in enumerate_words(P.alphabet, 8):
        assert simulate_pda(P, w) == is_anbn(w)


def test_pda_accepting_only_empty_word():
    alphabet = InvolutiveAlphabet.symmetric("a")
    P = PushdownAutomaton(alphabet, ("s",), 2, 0, {0}, (PDATransition(0, ("a",), "none", None, 1),))
    A = pda_to_polycyclic(P)
    accepted = [w for w in enumerate_words(alphabet, 4) if run_nondeterministic(A, w).accepted]
    assert accepted == [()]


def test_pda_with_empty_input_moves():
    # push on a, then pop silently: accepts a^n with any n
    alphabet = InvolutiveAlphabet.symmetric("a")
    P = PushdownAutomaton(
        alphabet,
        ("s",),
        2,
        0,
        {1},
        (
            PDATransition(0, ("a",), "push", "s", 0),
            PDATransition(0, (), "none", None, 1),
            PDATransition(1, (), "pop", "s", 1),
        ),
    )
    A = pda_to_polycyclic(P)
    for w in enumerate_words(alphabet, 5):
        assert run_nondeterministic(A, w).accepted == simulate_pda(P, w) == ("A" not in w)


def test_pda_validation():
    alphabet = InvolutiveAlphabet.symmetric("a")
    with pytest.raises(GalleryError):
        PushdownAutomaton(alphabet, ("s",), 1, 0, {0}, (PDATransition(0, ("a",), "push", "t", 0),))
    with pytest.raises(GalleryError):
        PushdownAutomaton(alphabet, ("s",), 1, 0, {0}, (PDATransition(0, ("a",), "swap", "s", 0),))
    with pytest.raises(GalleryError):
        PushdownAutomaton(alphabet, ("s",), 1, 0, {0}, (PDATransition(0, ("a",), "push", None, 0),))


def test_pda_stack_letters_are_renamed():
    A = pda_to_polycyclic(anbn_pda())
    labels = {e.label for e in A.edges}
    assert labels == {PolycyclicElement("", "a"), PolycyclicElement("a", "")}


def test_dyck_examples():
    A1 = dyck_automaton(1, [("a", "b")])
    assert det_accepts(A1, "ab") and not det_accepts(A1, "ba")
    A2 = dyck_automaton(2)
    assert det_accepts(A2, "[()]") and det_accepts(A2, "") and not det_accepts(A2, "[(])")


def test_balanced_matches_linear_checker():
    pairs = BRACKETS[:2]
    for w in enumerate_words([c for p in pairs for c in p], 6):
        assert balanced(w, pairs) == linear_bracket_check(w, pairs)


def test_dyck_rank_three_agrees():
    pairs = BRACKETS[:3]
    report = pruned_agreement(dyck_automaton(3), BracketStepper(pairs), 8, RunBounds(max_register_size=16))
    assert report.ok


def test_pda_image_pruned_agreement_small():
    P = load_pda(path("dyck2.pda"))
    report = pruned_agreement(pda_to_polycyclic(P), PDAStepper(P), 8, RunBounds(max_register_size=16))
    assert report.ok and report.total == sum(4**k for k in range(9))


def test_pda_stepper_matches_simulator():
    P = anbn_pda()
    step = PDAStepper(P)
    for w in enumerate_words(P.alphabet, 7):
        state = step.start()
        for x in w:
            state = None if state is None else step.step(state, x)
        assert (state is not None and step.accepts(state)) == simulate_pda(P, w)


def test_dyck_rank_validation():
    with pytest.raises(GalleryError):
        dyck_automaton(0)
    with pytest.raises(GalleryError):
        dyck_pda(2, [("(", ")")])


def test_default_labels():
    P = Polycyclic(2)
    labels = default_label_set(P)
    assert len(labels) == 5 and P.identity in labels
    assert set(default_label_set(FreeAbelian(1))) == {FreeAbelian(1).parse(t) for t in ("[0]", "[1]", "[-1]")}


def test_candidate_count():
    labels = default_label_set(Polycyclic(2))
    alphabet = integers_oracle().alphabet
    # one state: each of the 2 letters has no edge or one of 5 loops
    assert sum(1 for _ in iter_candidates(1, labels, Polycyclic(2), alphabet)) == 36


def test_refuter_one_state():
    out = polycyclic_refuter(1, max_len=6)
    assert out.enumerated == 36 and out.refuted == 36 and not out.survivors
    assert out.report.result == "pass"


def test_refuter_search_ceiling():
    with pytest.raises(GalleryError):
        polycyclic_refuter(3, max_len=4)


def test_refuter_integer_contrast_survivor_is_a_counter():
    out = polycyclic_refuter(1, max_len=8, monoid=FreeAbelian(1), expect_survivors=True)
    assert out.survivors
    Z = FreeAbelian(1)
    for A in out.survivors:
        labels = {e.word[0]: e.label for e in A.edges}
        assert Z.is_identity(Z._mul(labels["a"], labels["A"]))
        assert not Z.is_identity(labels["a"])


def test_demo_names():
    assert "refuter-2-state" in DEMOS and "dyck-2" in DEMOS
    with pytest.raises(GalleryError):
        demo("nope")


@pytest.mark.parametrize("name", ["counter-z", "counter-z2", "anbn", "refuter-1-state"])
def test_quick_demos_pass(name):
    assert demo(name).result == "pass"
