"""Worked instances: blind counter machines, pushdown automata as
polycyclic-monoid automata, Dyck languages, and a bounded refuter showing
that no small deterministic polycyclic automaton accepts the word problem of
the integers.
"""
from __future__ import annotations

import itertools
import string
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .automata import (
    DeterministicMAutomaton,
    Edge,
    MAutomaton,
    RunBounds,
    Stepper,
    acceptance_bitmap,
    det_accepts,
    pruned_agreement,
)
from .groups import GroupOracle, InvolutiveAlphabet, Word, as_word, enumerate_words, word_str
from .monoids import FreeAbelian, FreeAbelianElement, Monoid, Polycyclic, PolycyclicElement
from .report import INCONCLUSIVE, PASS, Report


class GalleryError(ValueError):
    pass


def _make(M: Monoid, alphabet, n_states, initial, terminals, edges) -> MAutomaton:
    try:
        return DeterministicMAutomaton(M, alphabet, n_states, initial, frozenset(terminals), tuple(edges))
    except ValueError:
        return MAutomaton(M, alphabet, n_states, initial, frozenset(terminals), tuple(edges))


# ---------------------------------------------------------------------------
# blind counter machines


def make_counter_automaton(
    n: int,
    edge_spec,
    alphabet: InvolutiveAlphabet | None = None,
    n_states: int = 1,
    initial: int = 0,
    terminals: Iterable[int] = (0,),
) -> MAutomaton:
    """Blind ``n``-counter machine as a ``Z^n``-automaton.

    ``edge_spec`` is either ``{letter: vector}`` (loops on a single state) or
    a list of ``(src, vector, word, dst)``.  The result is deterministic when
    the edges allow it.
    """
    M = FreeAbelian(n)
    if isinstance(edge_spec, dict):
        edge_spec = [(0, v, x, 0) for x, v in edge_spec.items()]
    edges = []
    for src, vec, word, dst in edge_spec:
        vec = tuple(vec)
        if len(vec) != n:
            raise GalleryError(f"counter vector {vec} does not have {n} entries")
        edges.append(Edge(src, FreeAbelianElement(vec), as_word(word), dst))
    if alphabet is None:
        gens = sorted({x.lower() for e in edges for x in e.word}) or ["a"]
        alphabet = InvolutiveAlphabet.symmetric("".join(gens))
    return _make(M, alphabet, n_states, initial, terminals, edges)


# ---------------------------------------------------------------------------
# pushdown automata


@dataclass(frozen=True)
class PDATransition:
    src: int
    word: Word  # empty or one letter
    action: str  # "push", "pop" or "none"
    stack_letter: str | None
    dst: int


@dataclass(frozen=True)
class PushdownAutomaton:
    """Accepts by final state together with an empty stack."""

    alphabet: InvolutiveAlphabet
    stack_letters: tuple[str, ...]
    n_states: int
    initial: int
    finals: frozenset
    transitions: tuple

    def __post_init__(self):
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        for k, t in enumerate(self.transitions):
            if t.action not in ("push", "pop", "none"):
                raise GalleryError(f"transition {k}: unknown stack action {t.action!r}")
            if (t.action == "none") != (t.stack_letter is None):
                raise GalleryError(f"transition {k}: stack letter required exactly for push/pop")
            if t.stack_letter is not None and t.stack_letter not in self.stack_letters:
                raise GalleryError(f"transition {k}: unknown stack letter {t.stack_letter!r}")
            if len(t.word) > 1 or any(x not in self.alphabet.involution for x in t.word):
                raise GalleryError(f"transition {k}: input must be one alphabet letter or empty")
            if not (0 <= t.src < self.n_states and 0 <= t.dst < self.n_states):
                raise GalleryError(f"transition {k}: state out of range")


def simulate_pda(P: PushdownAutomaton, w: Sequence[str], max_stack: int | None = None) -> bool:
    """Direct stack-machine simulation (breadth-first over configurations)."""
    w = as_word(w)
    limit = len(w) + 2 * P.n_states + 4 if max_stack is None else max_stack
    start = (P.initial, 0, ())
    seen = {start}
    queue = deque([start])
    while queue:
        q, pos, stack = queue.popleft()
        if pos == len(w) and not stack and q in P.finals:
            return True
        for t in P.transitions:
            if t.src != q:
                continue
            if t.word and (pos == len(w) or w[pos] != t.word[0]):
                continue
            if t.action == "push":
                if len(stack) >= limit:
                    continue
                nstack = stack + (t.stack_letter,)
            elif t.action == "pop":
                if not stack or stack[-1] != t.stack_letter:
                    continue
                nstack = stack[:-1]
            else:
                nstack = stack
            c = (t.dst, pos + len(t.word), nstack)
            if c not in seen:
                seen.add(c)
                queue.append(c)
    return False


def pda_to_polycyclic(P: PushdownAutomaton) -> MAutomaton:
    """Same state graph; push x becomes (e|x), pop x becomes (x|e).

    Stack letters are renamed to the polycyclic letters a, b, ... in order.
    """
    M = Polycyclic(len(P.stack_letters))
    rename = dict(zip(P.stack_letters, M.letters))
    edges = []
    for t in P.transitions:
        if t.action == "push":
            label = PolycyclicElement("", rename[t.stack_letter])
        elif t.action == "pop":
            label = PolycyclicElement(rename[t.stack_letter], "")
        else:
            label = M.identity
        edges.append(Edge(t.src, label, t.word, t.dst))
    return MAutomaton(M, P.alphabet, P.n_states, P.initial, P.finals, tuple(edges))


def anbn_pda() -> PushdownAutomaton:
    alphabet = InvolutiveAlphabet.from_pairs("ab", [("a", "b")])
    return PushdownAutomaton(
        alphabet,
        ("s",),
        2,
        0,
        frozenset({0, 1}),
        (
            PDATransition(0, ("a",), "push", "s", 0),
            PDATransition(0, ("b",), "pop", "s", 1),
            PDATransition(1, ("b",), "pop", "s", 1),
        ),
    )


BRACKETS = [("(", ")"), ("[", "]"), ("{", "}"), ("<", ">")]


def _dyck_pairs(rank: int, pairs: Sequence[tuple[str, str]] | None):
    if rank < 1:
        raise GalleryError("rank must be at least 1")
    pairs = list(pairs) if pairs is not None else BRACKETS[:rank]
    if len(pairs) != rank:
        raise GalleryError(f"need {rank} bracket pairs")
    return pairs, InvolutiveAlphabet.from_pairs([c for p in pairs for c in p], pairs)


def dyck_pda(rank: int = 2, pairs=None) -> PushdownAutomaton:
    pairs, alphabet = _dyck_pairs(rank, pairs)
    stack = tuple(string.ascii_lowercase[:rank])
    trans = []
    for (op, cl), s in zip(pairs, stack):
        trans.append(PDATransition(0, (op,), "push", s, 0))
        trans.append(PDATransition(0, (cl,), "pop", s, 0))
    return PushdownAutomaton(alphabet, stack, 1, 0, frozenset({0}), tuple(trans))


def dyck_automaton(rank: int = 2, pairs=None) -> DeterministicMAutomaton:
    """One-state deterministic polycyclic automaton accepting the Dyck language."""
    pairs, alphabet = _dyck_pairs(rank, pairs)
    M = Polycyclic(rank)
    edges = []
    for (op, cl), s in zip(pairs, M.letters):
        edges.append(Edge(0, PolycyclicElement("", s), (op,), 0))
        edges.append(Edge(0, PolycyclicElement(s, ""), (cl,), 0))
    return DeterministicMAutomaton(M, alphabet, 1, 0, frozenset({0}), tuple(edges))


def balanced(w: Sequence[str], pairs: Sequence[tuple[str, str]]) -> bool:
    """Linear-scan bracket checker."""
    closing = {cl: op for op, cl in pairs}
    stack = []
    for x in w:
        if x in closing:
            if not stack or stack.pop() != closing[x]:
                return False
        else:
            stack.append(x)
    return not stack


class BracketStepper(Stepper):
    """Incremental bracket checker; the state is the stack of open brackets."""

    def __init__(self, pairs: Sequence[tuple[str, str]]):
        self.closing = {cl: op for op, cl in pairs}

    def start(self):
        return ()

    def step(self, stack, x):
        if x in self.closing:
            if not stack or stack[-1] != self.closing[x]:
                return None
            return stack[:-1]
        return stack + (x,)

    def accepts(self, stack):
        return not stack


class PDAStepper(Stepper):
    """Incremental pushdown simulation; the state is a set of (state, stack) pairs."""

    def __init__(self, P: PushdownAutomaton, max_stack: int = 64):
        self.P = P
        self.max_stack = max_stack

    def _apply(self, t: PDATransition, stack):
        if t.action == "push":
            return stack + (t.stack_letter,) if len(stack) < self.max_stack else None
        if t.action == "pop":
            return stack[:-1] if stack and stack[-1] == t.stack_letter else None
        return stack

    def _close(self, configs):
        seen = set(configs)
        todo = list(configs)
        while todo:
            q, stack = todo.pop()
            for t in self.P.transitions:
                if t.src == q and not t.word:
                    ns = self._apply(t, stack)
                    if ns is not None and (t.dst, ns) not in seen:
                        seen.add((t.dst, ns))
                        todo.append((t.dst, ns))
        return frozenset(seen)

    def start(self):
        return self._close([(self.P.initial, ())])

    def step(self, configs, x):
        nxt = []
        for q, stack in configs:
            for t in self.P.transitions:
                if t.src == q and t.word == (x,):
                    ns = self._apply(t, stack)
                    if ns is not None:
                        nxt.append((t.dst, ns))
        closed = self._close(nxt)
        return closed or None

    def accepts(self, configs):
        return any(q in self.P.finals and not stack for q, stack in configs)


# ---------------------------------------------------------------------------
# refuter


def integers_oracle() -> GroupOracle:
    Z = FreeAbelian(1)
    alphabet = InvolutiveAlphabet.symmetric("a")
    return GroupOracle(Z, alphabet, {"a": FreeAbelianElement((1,)), "A": FreeAbelianElement((-1,))})


def default_label_set(M: Monoid) -> list:
    """Identity plus generators (and their inverses when they exist)."""
    if isinstance(M, Polycyclic):
        return [M.identity] + [M.push(x) for x in M.letters] + [M.pop(x) for x in M.letters]
    if isinstance(M, FreeAbelian):
        labels = [M.identity]
        for i in range(M.rank):
            for s in (1, -1):
                v = [0] * M.rank
                v[i] = s
                labels.append(FreeAbelianElement(tuple(v)))
        return labels
    raise GalleryError(f"no default label set for {M.describe()}")


@dataclass
class RefuterReport:
    monoid: str
    max_len: int
    enumerated: int = 0
    refuted: int = 0
    survivors: list[DeterministicMAutomaton] = field(default_factory=list)
    report: Report | None = None

    @property
    def inconclusive(self) -> int:
        return len(self.survivors)


def iter_candidates(state_bound: int, labels: Sequence, M: Monoid, alphabet: InvolutiveAlphabet):
    letters = alphabet.letters
    for k in range(1, state_bound + 1):
        slots = [(q, x) for q in range(k) for x in letters]
        options = [None] + [(d, g) for d in range(k) for g in labels]
        extra = list(range(1, k))
        terminal_sets = [
            frozenset((0,) + c) for r in range(len(extra) + 1) for c in itertools.combinations(extra, r)
        ]
        for choice in itertools.product(options, repeat=len(slots)):
            edges = tuple(
                Edge(q, opt[1], (x,), opt[0]) for (q, x), opt in zip(slots, choice) if opt is not None
            )
            for terms in terminal_sets:
                yield DeterministicMAutomaton(M, alphabet, k, 0, terms, edges)


def polycyclic_refuter(
    state_bound: int,
    label_set: Sequence | None = None,
    H: GroupOracle | None = None,
    max_len: int = 8,
    monoid: Monoid | None = None,
    max_candidates: int = 200000,
    expect_survivors: bool = False,
) -> RefuterReport:
    """Enumerate small deterministic automata and look for a disagreement with WP(H).

    Every automaton with at most ``state_bound`` states, edges labelled from
    ``label_set`` and a terminal set containing the initial state is tried
    on all words up to ``max_len``.  Candidates without a disagreement are
    survivors; for the polycyclic monoid none are expected, though absence of
    a disagreement within the bound would only be inconclusive.
    """
    H = H or integers_oracle()
    M = monoid or Polycyclic(2)
    labels = list(label_set) if label_set is not None else default_label_set(M)
    n = len(H.alphabet)
    per_k = [
        (1 + k * len(labels)) ** (k * n) * 2 ** (k - 1) for k in range(1, state_bound + 1)
    ]
    if sum(per_k) > max_candidates:
        raise GalleryError(f"search space of {sum(per_k)} candidates exceeds ceiling {max_candidates}")
    words = list(enumerate_words(H.alphabet, max_len))
    target = np.array([H.in_word_problem(w) for w in words], dtype=np.uint8)
    out = RefuterReport(M.describe(), max_len)
    use_sweep = isinstance(M, FreeAbelian)
    for A in iter_candidates(state_bound, labels, M, H.alphabet):
        out.enumerated += 1
        if use_sweep:
            refuted = not np.array_equal(acceptance_bitmap(A, max_len), target)
        else:
            refuted = any(det_accepts(A, w) != bool(t) for w, t in zip(words, target))
        if refuted:
            out.refuted += 1
        else:
            out.survivors.append(A)
    rep = Report(f"refuter over {M.describe()}, <= {state_bound} states, words <= {max_len}")
    rep.info.append(f"candidates enumerated: {out.enumerated}")
    rep.info.append(f"refuted: {out.refuted}")
    rep.info.append(f"inconclusive (no disagreement found): {out.inconclusive}")
    for A in out.survivors[:5]:
        desc = ", ".join(f"{e.src}-{word_str(e.word)}:{M.format(e.label)}->{e.dst}" for e in A.edges)
        rep.info.append(f"survivor: states={A.n_states} terminals={sorted(A.terminals)} edges=[{desc}]")
    if expect_survivors:
        rep.add("survivor-found", bool(out.survivors), f"{len(out.survivors)} survivors")
    else:
        rep.add("all-refuted", PASS if not out.survivors else INCONCLUSIVE, f"{out.refuted}/{out.enumerated}")
    out.report = rep
    return out


# ---------------------------------------------------------------------------
# named demos


def _agreement_demo(title: str, A: MAutomaton, predicate, max_len: int) -> Report:
    from .automata import language_agreement

    mode = "det" if A.deterministic else "nondet"
    agreement = language_agreement(A, predicate, max_len, mode=mode)
    rep = Report(title)
    rep.add(
        "agreement",
        agreement.ok,
        f"{agreement.total} words up to length {max_len}, {len(agreement.disagreements)} disagreements",
    )
    return rep


def demo(name: str) -> Report:
    if name == "counter-z":
        A = make_counter_automaton(1, {"a": (1,), "A": (-1,)})
        return _agreement_demo("blind 1-counter automaton vs WP(Z)", A, integers_oracle().in_word_problem, 12)
    if name == "counter-z2":
        A = make_counter_automaton(2, {"a": (1, 0), "A": (-1, 0), "b": (0, 1), "B": (0, -1)})
        return _agreement_demo(
            "blind 2-counter automaton vs WP(Z^2)",
            A,
            lambda w: w.count("a") == w.count("A") and w.count("b") == w.count("B"),
            8,
        )
    if name == "anbn":
        P = anbn_pda()
        return _agreement_demo("a^n b^n pushdown automaton as polycyclic automaton", pda_to_polycyclic(P),
                               lambda w: simulate_pda(P, w), 12)
    if name == "dyck-2":
        report = pruned_agreement(dyck_automaton(2), BracketStepper(BRACKETS[:2]), 14, RunBounds(max_register_size=16))
        rep = Report("Dyck-2 deterministic polycyclic automaton vs bracket checker")
        rep.add("agreement", report.ok, f"{report.total} words up to length 14, {len(report.disagreements)} disagreements")
        return rep
    if name == "refuter-1-state":
        return polycyclic_refuter(1, max_len=6).report
    if name == "refuter-2-state":
        return polycyclic_refuter(2, max_len=8).report
    if name == "refuter-z-contrast":
        return polycyclic_refuter(2, max_len=8, monoid=FreeAbelian(1), expect_survivors=True).report
    raise GalleryError(f"unknown gallery demo {name!r}; choose from {', '.join(DEMOS)}")


DEMOS = ("counter-z", "counter-z2", "anbn", "dyck-2", "refuter-1-state", "refuter-2-state", "refuter-z-contrast")
