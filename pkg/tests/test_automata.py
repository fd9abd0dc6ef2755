import itertools

import numpy as np
import pytest

from mautomata.automata import (
    AutomatonError,
    DeterministicMAutomaton,
    Edge,
    MAutomaton,
    RunBounds,
    acceptance_bitmap,
    between_terminal_fa,
    det_accepts,
    find_identity_register_path,
    language_agreement,
    pruned_agreement,
    regauge,
    run_deterministic,
    run_nondeterministic,
    subdivide_edges,
    underlying_automaton,
)
from mautomata.data import path
from mautomata.formats import load_automaton
from mautomata.gallery import BRACKETS, BracketStepper, balanced, dyck_automaton, make_counter_automaton
from mautomata.groups import InvolutiveAlphabet, enumerate_words
from mautomata.kernels import BACKENDS, sweep_abelian
from mautomata.monoids import FreeAbelian, FreeAbelianElement, PolycyclicElement

Z = FreeAbelian(1)
AA = InvolutiveAlphabet.symmetric("a")
PAIRS2 = BRACKETS[:2]


def z(n):
    return FreeAbelianElement((n,))


def counter():
    return make_counter_automaton(1, {"a": (1,), "A": (-1,)})


def exponent_sum_zero(w):
    return w.count("a") == w.count("A")


def brute_force_registers(A, w):
    """Registers of every path reading w, by explicit path enumeration (no epsilon edges)."""
    M = A.monoid
    out = set()

    def walk(q, reg, pos):
        if pos == len(w):
            out.add((q, reg))
            return
        for e in A.edges:
            if e.src == q and e.word == (w[pos],):
                walk(e.dst, M._mul(reg, e.label), pos + 1)

    walk(A.initial, M.identity, 0)
    return out


def brute_force_between_terminals(A, w):
    """Is there a terminal-to-terminal path in the underlying automaton reading w?"""
    for t in A.terminals:
        states = {t}
        for x in w:
            states = {e.dst for e in A.edges if e.src in states and e.word == (x,)}
        if states & A.terminals:
            return True
    return False


def test_counter_runs():
    A = counter()
    out = run_deterministic(A, "aAaA")
    assert out.accepted and out.final.register == z(0)
    out = run_deterministic(A, "aa")
    assert not out.accepted and out.reason == "register-not-identity" and out.final.register == z(2)
    assert len(out.trace) == 3


def test_dyck_run():
    A = dyck_automaton(2)
    assert run_deterministic(A, "[]").accepted
    assert run_deterministic(A, "[()]").accepted
    assert not run_deterministic(A, "[)").accepted
    assert run_deterministic(A, "").accepted


def test_rejection_reasons():
    A = DeterministicMAutomaton(Z, AA, 2, 0, frozenset({0}), (Edge(0, z(0), ("a",), 1), Edge(1, z(0), ("a",), 0)))
    assert run_deterministic(A, "a").reason == "nonterminal-state"
    out = run_deterministic(A, "aAa")
    assert out.reason == "stuck" and out.stuck_at == 1
    with pytest.raises(Exception):
        run_deterministic(A, "ax")


def test_determinism_is_validated():
    with pytest.raises(AutomatonError):
        DeterministicMAutomaton(Z, AA, 1, 0, frozenset({0}), (Edge(0, z(1), ("a",), 0), Edge(0, z(-1), ("a",), 0)))
    with pytest.raises(AutomatonError):
        DeterministicMAutomaton(Z, AA, 1, 0, frozenset({0}), (Edge(0, z(1), (), 0),))
    with pytest.raises(AutomatonError):
        DeterministicMAutomaton(Z, AA, 1, 0, frozenset({0}), (Edge(0, z(1), ("a", "a"), 0),))


def test_structural_validation():
    with pytest.raises(AutomatonError):
        MAutomaton(Z, AA, 1, 0, frozenset({0}), (Edge(0, z(1), ("a",), 3),))
    with pytest.raises(AutomatonError):
        MAutomaton(Z, AA, 1, 2, frozenset({0}), ())
    with pytest.raises(Exception):
        MAutomaton(Z, AA, 1, 0, frozenset({0}), (Edge(0, PolycyclicElement("", "a"), ("a",), 0),))


def test_guess_sign_frontier():
    A = load_automaton(path("guess_sign.aut"))
    res = run_nondeterministic(A, "aa")
    assert {c.register for c in res.frontier} == {z(-2), z(0), z(2)}
    assert {(c.state, c.register) for c in res.frontier} == brute_force_registers(A, ("a", "a"))
    assert res.accepted and not res.truncated


def test_nondeterministic_frontier_matches_path_enumeration():
    A = load_automaton(path("guess_sign.aut"))
    for w in enumerate_words(A.alphabet, 6):
        res = run_nondeterministic(A, w)
        assert {(c.state, c.register) for c in res.frontier} == brute_force_registers(A, w)


def test_deterministic_run_nondeterministically():
    for A in (counter(), dyck_automaton(2)):
        B = A.as_nondeterministic()
        for w in enumerate_words(A.alphabet, 6 if len(A.alphabet) > 2 else 10):
            res = run_nondeterministic(B, w)
            assert max(res.frontier_sizes) <= 1
            assert res.accepted == det_accepts(A, w)


def test_schreier_fixtures_nondeterministic_agreement(schreier_automata):
    for A in schreier_automata.values():
        B = A.as_nondeterministic()
        for w in enumerate_words(A.alphabet, 5):
            res = run_nondeterministic(B, w)
            assert max(res.frontier_sizes) <= 1 and res.accepted == det_accepts(A, w)


def epsilon_fixture():
    # the counter with its a-edge split by an empty-input hop through state 1
    edges = (
        Edge(0, z(1), ("a",), 1),
        Edge(1, z(0), (), 0),
        Edge(0, z(-1), ("A",), 0),
        Edge(0, z(0), (), 0),  # identity loop, collapsed by the closure
    )
    return MAutomaton(Z, AA, 2, 0, frozenset({0}), edges)


def test_epsilon_edges_and_identity_cycles():
    A = epsilon_fixture()
    res = run_nondeterministic(A, "")
    assert {c.state for c in res.frontier} == {0}
    assert not res.truncated
    for w in enumerate_words(AA, 6):
        res = run_nondeterministic(A, w)
        assert res.verdict in ("accept", "reject")
        assert res.accepted == exponent_sum_zero(w)


def test_growing_epsilon_cycle_is_truncated():
    A = MAutomaton(Z, AA, 1, 0, frozenset({0}), (Edge(0, z(1), (), 0), Edge(0, z(1), ("A",), 0)))
    res = run_nondeterministic(A, "A", RunBounds(max_register_size=5))
    assert res.truncated
    assert res.verdict == "unknown"


def test_truncation_is_unknown_not_reject():
    A = load_automaton(path("guess_sign.aut"))
    res = run_nondeterministic(A, "a" * 5, RunBounds(max_register_size=2))
    assert res.truncated and res.verdict == "unknown"


def test_word_edges():
    A = MAutomaton(Z, AA, 1, 0, frozenset({0}), (Edge(0, z(2), ("a", "a"), 0), Edge(0, z(-1), ("A",), 0)))
    assert run_nondeterministic(A, "aaAA").accepted
    assert not run_nondeterministic(A, "aAA").accepted


def test_underlying_automaton_contains_language():
    fixtures = [counter(), dyck_automaton(2), load_automaton(path("guess_sign.aut")), epsilon_fixture()]
    for A in fixtures:
        fa = underlying_automaton(A)
        n = 6 if len(A.alphabet) > 2 else 10
        for w in enumerate_words(A.alphabet, n):
            accepted = det_accepts(A, w) if A.deterministic else run_nondeterministic(A, w).accepted
            if accepted:
                assert fa.accepts(w)


def test_underlying_automaton_examples():
    assert underlying_automaton(counter()).accepted_words(3) == set(enumerate_words(AA, 3))
    fa = underlying_automaton(dyck_automaton(2))
    for w in enumerate_words(fa.letters, 6):
        if balanced(w, PAIRS2):
            assert fa.accepts(w)
    empty = counter().with_terminals(())
    assert underlying_automaton(empty).accepted_words(4) == set()


def test_between_terminal_fa(schreier_automata):
    A = schreier_automata["z_2z.scn"]
    J = between_terminal_fa(A).accepted_words(8)
    assert J == {w for w in enumerate_words(AA, 8) if len(w) % 2 == 0}
    loop = DeterministicMAutomaton(Z, AA, 1, 0, frozenset({0}), (Edge(0, z(0), ("a",), 0),))
    assert between_terminal_fa(loop).accepted_words(4) == {("a",) * k for k in range(5)}
    assert between_terminal_fa(counter().with_terminals(())).accepted_words(3) == set()


def test_between_terminal_fa_matches_path_enumeration(schreier_automata):
    fixtures = list(schreier_automata.values()) + [
        counter(),
        DeterministicMAutomaton(Z, AA, 3, 0, frozenset({0, 2}), (
            Edge(0, z(1), ("a",), 1), Edge(1, z(0), ("A",), 2), Edge(2, z(0), ("a",), 0), Edge(1, z(0), ("a",), 1),
        )),
    ]
    for A in fixtures:
        fa = between_terminal_fa(A)
        n = 10 if len(A.alphabet) == 2 else 6
        words = fa.accepted_words(n)
        for w in enumerate_words(A.alphabet, n):
            assert (w in words) == brute_force_between_terminals(A, w)


def test_identity_register_paths(schreier_automata):
    A = schreier_automata["z_2z.scn"]
    assert find_identity_register_path(A, 0, 0) == ()
    assert find_identity_register_path(A, 1, 1) == ()
    assert find_identity_register_path(A, 0, 0, nonempty=True) == ("a", "A")
    # the edge 0 -a-> 1 carries the identity, so "a" is a witness
    assert find_identity_register_path(A, 0, 1) == ("a",)


def test_identity_register_path_absent():
    A = DeterministicMAutomaton(Z, AA, 2, 0, frozenset({0}), (Edge(0, z(1), ("a",), 1), Edge(1, z(1), ("a",), 1)))
    assert find_identity_register_path(A, 0, 1, max_len=8) is None


def test_identity_register_path_is_shortest_by_enumeration(schreier_automata):
    for A in schreier_automata.values():
        n = 4 if len(A.alphabet) > 2 else 6
        words = list(enumerate_words(A.alphabet, n))
        for p, q in itertools.product(range(A.n_states), repeat=2):
            got = find_identity_register_path(A, p, q, max_len=n, nonempty=True)
            expected = next((w for w in words if w and _reaches_with_identity(A, p, q, w)), None)
            assert got == expected


def _reaches_with_identity(A, p, q, w):
    M = A.monoid
    reg, state = M.identity, p
    for x in w:
        e = A.step(state, x)
        if e is None:
            return False
        state, reg = e.dst, M._mul(reg, e.label)
    return state == q and M.is_identity(reg)


def test_language_agreement_counter():
    report = language_agreement(counter(), exponent_sum_zero, 10)
    assert report.total == 2047 and report.agreed == 2047 and report.ok


def test_language_agreement_broken():
    report = language_agreement(counter().with_terminals(()), exponent_sum_zero, 4)
    assert report.first_disagreement == ()
    assert not report.ok


def test_language_agreement_nondeterministic_mode():
    report = language_agreement(load_automaton(path("guess_sign.aut")), lambda w: "A" not in w and len(w) % 2 == 0 or exponent_sum_zero(w) and "a" not in w, 6, mode="nondet")
    assert report.ok
    cut = language_agreement(load_automaton(path("guess_sign.aut")), lambda w: False, 6, mode="nondet", bounds=RunBounds(max_register_size=2))
    assert cut.truncated
    assert cut.agreed + len(cut.disagreements) + len(cut.truncated) == cut.total


def test_dyck_agreement_to_twelve():
    report = pruned_agreement(dyck_automaton(2), BracketStepper(PAIRS2), 12, RunBounds(max_register_size=16))
    assert report.total == sum(4**k for k in range(13))
    assert report.ok


def test_pruned_agreement_matches_plain_enumeration():
    A = dyck_automaton(2)
    broken = A.with_terminals(())
    for B in (A, broken):
        plain = language_agreement(B, lambda w: balanced(w, PAIRS2), 6)
        pruned = pruned_agreement(B, BracketStepper(PAIRS2), 6)
        assert pruned.total == plain.total
        assert pruned.agreed == plain.agreed
        assert [d[0] for d in pruned.disagreements] == [d[0] for d in plain.disagreements]


def test_regauge_preserves_language(schreier_automata):
    A = schreier_automata["z_2z.scn"]
    B = regauge(A, {1: z(5)})
    assert B.edges != A.edges
    assert np.array_equal(acceptance_bitmap(A, 12), acceptance_bitmap(B, 12))


def test_regauge_rejects_terminal_potential(schreier_automata):
    with pytest.raises(AutomatonError):
        regauge(schreier_automata["z_2z.scn"], {0: z(1)})


def test_subdivide_edges_preserves_language():
    A = dyck_automaton(2)

    def factor(g):
        # (u|v) = (u|e)(e|v)
        return PolycyclicElement(g.pop, ""), PolycyclicElement("", g.push)

    B = subdivide_edges(A, factor)
    assert not B.deterministic
    for w in enumerate_words(A.alphabet, 6):
        assert run_nondeterministic(B, w).accepted == det_accepts(A, w)


def test_subdivide_rejects_bad_factorisation():
    with pytest.raises(AutomatonError):
        subdivide_edges(counter(), lambda g: (g, g))


def test_bitmap_matches_runs(schreier_automata):
    fixtures = list(schreier_automata.values()) + [counter(), dyck_automaton(2)]
    for A in fixtures:
        n = 5 if len(A.alphabet) > 2 else 10
        bitmap = acceptance_bitmap(A, n)
        runs = [det_accepts(A, w) for w in enumerate_words(A.alphabet, n)]
        assert bitmap.tolist() == runs


@pytest.mark.skipif("compiled" not in BACKENDS, reason="compiled kernel not built")
def test_kernel_backends_agree(schreier_automata):
    from mautomata.automata import abelian_encoding

    for A in [schreier_automata["z_2z.scn"], schreier_automata["dinf.scn"], schreier_automata["s3.scn"], counter()]:
        trans, deltas, terminal = abelian_encoding(A)
        for start in range(A.n_states):
            a = sweep_abelian(trans, deltas, start, terminal, 7, backend="compiled")
            b = sweep_abelian(trans, deltas, start, terminal, 7, backend="python")
            assert np.array_equal(a, b)


def test_partial_automaton_sweep():
    A = DeterministicMAutomaton(Z, AA, 2, 0, frozenset({0}), (Edge(0, z(1), ("a",), 1), Edge(1, z(-1), ("A",), 0)))
    words = list(enumerate_words(AA, 6))
    for backend in BACKENDS:
        bitmap = acceptance_bitmap(A, 6, backend=backend)
        assert [w for w, b in zip(words, bitmap) if b] == [("a", "A") * k for k in range(4)]


def test_missing_transitions():
    A = DeterministicMAutomaton(Z, AA, 2, 0, frozenset({0}), (Edge(0, z(1), ("a",), 1),))
    assert not A.is_complete()
    assert set(A.missing_transitions()) == {(0, "A"), (1, "a"), (1, "A")}
    assert counter().is_complete()


def test_polycyclic_register_dies():
    A = dyck_automaton(2)
    out = run_deterministic(A, ")(")
    assert out.reason == "register-not-identity"
    assert out.final.register == PolycyclicElement("a", "a")
    out = run_deterministic(A, "(]")
    assert not out.accepted and A.monoid.is_dead(out.final.register)
