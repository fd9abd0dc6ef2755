"""Blind register automata over a monoid and their run semantics.

An automaton reads its input while multiplying a register (initialised to
the identity) on the right by edge labels.  It cannot inspect the register;
a word is accepted when some run consumes it, ends at a terminal state and
leaves the register equal to the identity.
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .groups import InvolutiveAlphabet, Word, as_word, count_words, enumerate_words, word_str
from .monoids import FreeAbelian, Monoid, TrivialMonoid


class AutomatonError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    src: int
    label: object
    word: Word
    dst: int


@dataclass(frozen=True)
class MAutomaton:
    """Automaton over ``monoid x alphabet*``; states are ``0..n_states-1``."""

    monoid: Monoid
    alphabet: InvolutiveAlphabet
    n_states: int
    initial: int
    terminals: frozenset
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        object.__setattr__(self, "edges", tuple(self.edges))
        if self.n_states < 1:
            raise AutomatonError("an automaton needs at least one state")
        if not 0 <= self.initial < self.n_states:
            raise AutomatonError(f"initial state {self.initial} out of range")
        for q in self.terminals:
            if not 0 <= q < self.n_states:
                raise AutomatonError(f"terminal state {q} out of range")
        for k, e in enumerate(self.edges):
            if not (0 <= e.src < self.n_states and 0 <= e.dst < self.n_states):
                raise AutomatonError(f"edge {k} has an endpoint out of range")
            if not self.monoid.contains(e.label):
                raise AutomatonError(f"edge {k} label {e.label!r} is not in {self.monoid.describe()}")
            for x in e.word:
                if x not in self.alphabet.involution:
                    raise AutomatonError(f"edge {k} reads unknown letter {x!r}")
        out: dict[int, list[Edge]] = {q: [] for q in range(self.n_states)}
        for e in self.edges:
            out[e.src].append(e)
        object.__setattr__(self, "_out", out)

    @property
    def deterministic(self) -> bool:
        return False

    def out_edges(self, q: int) -> list[Edge]:
        return self._out[q]

    def with_initial(self, q: int) -> "MAutomaton":
        return replace(self, initial=q)

    def with_terminals(self, terminals: Iterable[int]) -> "MAutomaton":
        return replace(self, terminals=frozenset(terminals))

    def as_nondeterministic(self) -> "MAutomaton":
        return MAutomaton(self.monoid, self.alphabet, self.n_states, self.initial, self.terminals, self.edges)


@dataclass(frozen=True)
class DeterministicMAutomaton(MAutomaton):
    """Single-letter edges, at most one edge per (state, letter)."""

    def __post_init__(self):
        super().__post_init__()
        delta: dict[tuple[int, str], Edge] = {}
        for k, e in enumerate(self.edges):
            if len(e.word) != 1:
                raise AutomatonError(f"edge {k} must read exactly one letter, reads {word_str(e.word)!r}")
            key = (e.src, e.word[0])
            if key in delta:
                raise AutomatonError(f"determinism violated: edge {k} duplicates ({e.src}, {e.word[0]!r})")
            delta[key] = e
        object.__setattr__(self, "_delta", delta)

    @property
    def deterministic(self) -> bool:
        return True

    def step(self, q: int, x: str) -> Edge | None:
        return self._delta.get((q, x))

    def missing_transitions(self, states: Iterable[int] | None = None) -> list[tuple[int, str]]:
        states = range(self.n_states) if states is None else states
        return [(q, x) for q in states for x in self.alphabet.letters if (q, x) not in self._delta]

    def is_complete(self, states: Iterable[int] | None = None) -> bool:
        return not self.missing_transitions(states)


@dataclass(frozen=True)
class Configuration:
    state: int
    register: object


@dataclass(frozen=True)
class RunBounds:
    max_configurations: int = 20000
    max_register_size: int = 12
    max_epsilon_chain: int = 16

    def __post_init__(self):
        if min(self.max_configurations, self.max_register_size, self.max_epsilon_chain) <= 0:
            raise AutomatonError("run bounds must be positive")


# ---------------------------------------------------------------------------
# deterministic runs

ACCEPTED = "accepted"
NONTERMINAL = "nonterminal-state"
REGISTER = "register-not-identity"
STUCK = "stuck"


@dataclass
class RunOutcome:
    accepted: bool
    reason: str
    final: Configuration
    trace: list[Configuration]
    stuck_at: int | None = None


def run_deterministic(A: DeterministicMAutomaton, w: Sequence[str], start: int | None = None) -> RunOutcome:
    w = A.alphabet.check_word(w)
    M = A.monoid
    q = A.initial if start is None else start
    reg = M.identity
    trace = [Configuration(q, reg)]
    for pos, x in enumerate(w):
        e = A.step(q, x)
        if e is None:
            return RunOutcome(False, STUCK, trace[-1], trace, stuck_at=pos)
        q, reg = e.dst, M._mul(reg, e.label)
        trace.append(Configuration(q, reg))
    final = trace[-1]
    if q not in A.terminals:
        return RunOutcome(False, NONTERMINAL, final, trace)
    if not M.is_identity(reg):
        return RunOutcome(False, REGISTER, final, trace)
    return RunOutcome(True, ACCEPTED, final, trace)


def det_accepts(A: DeterministicMAutomaton, w: Sequence[str], start: int | None = None) -> bool:
    M = A.monoid
    q = A.initial if start is None else start
    reg = M.identity
    for x in w:
        e = A._delta.get((q, x))
        if e is None:
            return False
        q, reg = e.dst, M._mul(reg, e.label)
    return q in A.terminals and M.is_identity(reg)


# ---------------------------------------------------------------------------
# nondeterministic runs

ACCEPT, REJECT, UNKNOWN = "accept", "reject", "unknown"


@dataclass
class NondetResult:
    frontier: frozenset
    truncated: bool
    verdict: str
    frontier_sizes: list[int] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.verdict == ACCEPT


def epsilon_closure(A: MAutomaton, configs: Iterable[Configuration], bounds: RunBounds) -> tuple[set, bool]:
    """Close under empty-input edges, at most ``max_epsilon_chain`` compositions deep.

    Returns the closed set and whether anything was dropped (register too
    large, or the chain limit cut off further configurations).
    """
    M = A.monoid
    closed = set(configs)
    layer = list(closed)
    truncated = False
    for _ in range(bounds.max_epsilon_chain):
        nxt = []
        for c in layer:
            for e in A.out_edges(c.state):
                if e.word:
                    continue
                reg = M._mul(c.register, e.label)
                if M.is_dead(reg):
                    continue
                if M.size(reg) > bounds.max_register_size:
                    truncated = True
                    continue
                d = Configuration(e.dst, reg)
                if d not in closed:
                    closed.add(d)
                    nxt.append(d)
        layer = nxt
        if not layer:
            break
    else:
        if any(not e.word for c in layer for e in A.out_edges(c.state)):
            truncated = True
    return closed, truncated


def run_nondeterministic(A: MAutomaton, w: Sequence[str], bounds: RunBounds = RunBounds()) -> NondetResult:
    """Configurations reachable from ``(initial, 1)`` consuming exactly ``w``.

    Frontiers are kept per input position so edges reading several letters
    land at the right place.  Registers larger than the bound are dropped and
    the result marked truncated; an accepting configuration is still a sound
    acceptance, otherwise a truncated run is ``unknown``.
    """
    w = A.alphabet.check_word(w)
    M = A.monoid
    n = len(w)
    pending: list[set[Configuration]] = [set() for _ in range(n + 1)]
    pending[0].add(Configuration(A.initial, M.identity))
    truncated = False
    sizes = []
    frontier: set[Configuration] = set()
    for pos in range(n + 1):
        frontier, cut = epsilon_closure(A, pending[pos], bounds)
        truncated |= cut
        if len(frontier) > bounds.max_configurations:
            truncated = True
            frontier = set(sorted(frontier, key=lambda c: (M.size(c.register), c.state))[: bounds.max_configurations])
        sizes.append(len(frontier))
        if pos == n:
            break
        for c in frontier:
            for e in A.out_edges(c.state):
                k = len(e.word)
                if not k or tuple(w[pos : pos + k]) != e.word:
                    continue
                reg = M._mul(c.register, e.label)
                if M.is_dead(reg):
                    continue
                if M.size(reg) > bounds.max_register_size:
                    truncated = True
                    continue
                pending[pos + k].add(Configuration(e.dst, reg))
    frozen = frozenset(frontier)
    if any(c.state in A.terminals and M.is_identity(c.register) for c in frozen):
        verdict = ACCEPT
    else:
        verdict = UNKNOWN if truncated else REJECT
    return NondetResult(frozen, truncated, verdict, sizes)


# ---------------------------------------------------------------------------
# underlying automata


@dataclass(frozen=True)
class FiniteAutomaton:
    """Classical automaton with word-labelled edges and a set of initial states."""

    letters: tuple[str, ...]
    n_states: int
    initials: frozenset
    finals: frozenset
    edges: tuple  # (src, word, dst)

    def _closure(self, states: set[int]) -> set[int]:
        stack = list(states)
        seen = set(states)
        while stack:
            q = stack.pop()
            for s, w, d in self.edges:
                if s == q and not w and d not in seen:
                    seen.add(d)
                    stack.append(d)
        return seen

    def accepts(self, w: Sequence[str]) -> bool:
        w = as_word(w)
        n = len(w)
        at: list[set[int]] = [set() for _ in range(n + 1)]
        at[0] = set(self.initials)
        for pos in range(n + 1):
            at[pos] = self._closure(at[pos])
            if pos == n:
                break
            for s, word, d in self.edges:
                k = len(word)
                if k and s in at[pos] and tuple(w[pos : pos + k]) == word:
                    at[pos + k].add(d)
        return bool(at[n] & self.finals)

    def is_letter_automaton(self) -> bool:
        return all(len(w) <= 1 for _, w, _ in self.edges)

    def accepted_words(self, max_len: int) -> set[Word]:
        """Every accepted word up to ``max_len`` (subset construction on demand)."""
        if not self.is_letter_automaton():
            return {w for w in enumerate_words(self.letters, max_len) if self.accepts(w)}
        step: dict[tuple[int, str], set[int]] = {}
        for s, w, d in self.edges:
            if w:
                step.setdefault((s, w[0]), set()).add(d)
        cache: dict[tuple[frozenset, str], frozenset] = {}

        def move(subset: frozenset, x: str) -> frozenset:
            key = (subset, x)
            if key not in cache:
                nxt: set[int] = set()
                for q in subset:
                    nxt |= step.get((q, x), set())
                cache[key] = frozenset(self._closure(nxt))
            return cache[key]

        out: set[Word] = set()
        start = frozenset(self._closure(set(self.initials)))
        level = [((), start)]
        for depth in range(max_len + 1):
            nxt_level = []
            for w, subset in level:
                if subset & self.finals:
                    out.add(w)
                if depth < max_len:
                    for x in self.letters:
                        s2 = move(subset, x)
                        if s2:
                            nxt_level.append((w + (x,), s2))
            level = nxt_level
        return out


def underlying_automaton(A: MAutomaton) -> FiniteAutomaton:
    return FiniteAutomaton(
        A.alphabet.letters,
        A.n_states,
        frozenset([A.initial]),
        A.terminals,
        tuple((e.src, e.word, e.dst) for e in A.edges),
    )


def between_terminal_fa(A: MAutomaton) -> FiniteAutomaton:
    """Words read between two terminal states of the underlying automaton."""
    fa = underlying_automaton(A)
    return replace(fa, initials=A.terminals)


# ---------------------------------------------------------------------------
# bounded configuration search


def find_identity_register_path(
    A: MAutomaton,
    src: int,
    dst: int,
    bounds: RunBounds = RunBounds(),
    max_len: int = 10,
    nonempty: bool = False,
) -> Word | None:
    """Shortest (then lexicographically first) ``w`` with a path src -> dst labelled ``(1, w)``.

    ``None`` only means nothing was found within the bounds.  With
    ``nonempty=True`` the path must use at least one edge.
    """
    M = A.monoid
    order = {x: i for i, x in enumerate(A.alphabet.letters)}
    start = (src, M.identity, False)
    heap = [(0, (), 0, start)]
    best: dict = {start: (0, ())}
    counter = itertools.count(1)
    while heap:
        length, key, _, node = heapq.heappop(heap)
        q, reg, moved = node
        if best.get(node) != (length, key):
            continue
        if q == dst and M.is_identity(reg) and (moved or not nonempty):
            return tuple(A.alphabet.letters[i] for i in key)
        for e in A.out_edges(q):
            nl = length + len(e.word)
            if nl > max_len:
                continue
            nreg = M._mul(reg, e.label)
            if M.is_dead(nreg) or M.size(nreg) > bounds.max_register_size:
                continue
            nkey = key + tuple(order[x] for x in e.word)
            nnode = (e.dst, nreg, True)
            old = best.get(nnode)
            if old is not None and old <= (nl, nkey):
                continue
            if old is None and len(best) >= bounds.max_configurations:
                continue
            best[nnode] = (nl, nkey)
            heapq.heappush(heap, (nl, nkey, next(counter), nnode))
    return None


# ---------------------------------------------------------------------------
# exhaustive acceptance sweeps


def abelian_encoding(A: DeterministicMAutomaton):
    """Arrays for the compiled sweep, or ``None`` if the register is not Z^n / trivial."""
    if isinstance(A.monoid, FreeAbelian):
        dim = A.monoid.rank
    elif isinstance(A.monoid, TrivialMonoid):
        dim = 0
    else:
        return None
    letters = A.alphabet.letters
    trans = np.full((A.n_states, len(letters)), -1, dtype=np.int32)
    deltas = np.zeros((A.n_states, len(letters), dim), dtype=np.int64)
    for e in A.edges:
        x = letters.index(e.word[0])
        trans[e.src, x] = e.dst
        if dim:
            deltas[e.src, x] = e.label.vector
    terminal = np.zeros(A.n_states, dtype=np.uint8)
    for q in A.terminals:
        terminal[q] = 1
    return trans, deltas, terminal


def _sweep_generic(A: DeterministicMAutomaton, max_len: int, start: int) -> np.ndarray:
    M = A.monoid
    letters = A.alphabet.letters
    n = len(letters)
    out = np.zeros(count_words(n, max_len), dtype=np.uint8)
    offsets = [count_words(n, k - 1) if k else 0 for k in range(max_len + 1)]
    out[0] = start in A.terminals
    level = [(0, start, M.identity)]
    for depth in range(1, max_len + 1):
        nxt = []
        for num, q, reg in level:
            for i, x in enumerate(letters):
                e = A.step(q, x)
                if e is None:
                    continue
                r = M._mul(reg, e.label)
                if M.is_dead(r):
                    continue
                idx = num * n + i
                if e.dst in A.terminals and M.is_identity(r):
                    out[offsets[depth] + idx] = 1
                nxt.append((idx, e.dst, r))
        level = nxt
    return out


def acceptance_bitmap(
    A: DeterministicMAutomaton, max_len: int, start: int | None = None, backend: str | None = None
) -> np.ndarray:
    """Acceptance of every word up to ``max_len``, length-lexicographic order."""
    start = A.initial if start is None else start
    enc = abelian_encoding(A)
    if enc is not None:
        trans, deltas, terminal = enc
        return kernels.sweep_abelian(trans, deltas, start, terminal, max_len, backend=backend)
    return _sweep_generic(A, max_len, start)


@dataclass
class AgreementReport:
    max_len: int
    total: int = 0
    agreed: int = 0
    disagreements: list[tuple[Word, bool, bool]] = field(default_factory=list)
    truncated: list[Word] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements and not self.truncated

    @property
    def first_disagreement(self) -> Word | None:
        return self.disagreements[0][0] if self.disagreements else None


def language_agreement(
    A: MAutomaton,
    membership: Callable[[Word], bool],
    max_len: int,
    mode: str = "det",
    bounds: RunBounds = RunBounds(),
    start: int | None = None,
) -> AgreementReport:
    """Compare the automaton with ``membership`` on every word up to ``max_len``."""
    report = AgreementReport(max_len)
    words = enumerate_words(A.alphabet, max_len)
    if mode == "det":
        if not isinstance(A, DeterministicMAutomaton):
            raise AutomatonError("det mode needs a deterministic automaton")
        bitmap = acceptance_bitmap(A, max_len, start)
        verdicts: Iterable = ((w, bool(b)) for w, b in zip(words, bitmap))
    elif mode == "nondet":
        B = A if start is None else A.with_initial(start)

        def nondet_verdicts():
            for w in words:
                res = run_nondeterministic(B, w, bounds)
                yield w, (None if res.verdict == UNKNOWN else res.accepted)

        verdicts = nondet_verdicts()
    else:
        raise AutomatonError(f"unknown mode {mode!r}")
    for w, got in verdicts:
        report.total += 1
        if got is None:
            report.truncated.append(w)
            continue
        expected = bool(membership(w))
        if got == expected:
            report.agreed += 1
        else:
            report.disagreements.append((w, got, expected))
    return report


class Stepper:
    """Incremental membership oracle used by :func:`pruned_agreement`.

    ``step`` returns ``None`` only when no extension of the current prefix
    can be a member.
    """

    def start(self):
        raise NotImplementedError

    def step(self, state, letter: str):
        raise NotImplementedError

    def accepts(self, state) -> bool:
        raise NotImplementedError


def pruned_agreement(A: MAutomaton, oracle: Stepper, max_len: int, bounds: RunBounds = RunBounds()) -> AgreementReport:
    """Exhaustive agreement on every word up to ``max_len``.

    Walks the tree of prefixes carrying the automaton's configuration set and
    the oracle state.  A subtree is skipped only when both sides are dead
    (empty frontier with nothing truncated, and an oracle ``None``); all of
    its words are then rejected by both and are counted as agreeing.
    ``report.total`` therefore always equals the number of words up to
    ``max_len``.  Subtree outcomes are memoised on (configuration set,
    oracle state, remaining length), so oracle states must be hashable.
    Edges must read at most one letter.
    """
    if any(len(e.word) > 1 for e in A.edges):
        raise AutomatonError("pruned_agreement needs edges reading at most one letter")
    M = A.monoid
    letters = A.alphabet.letters
    n = len(letters)
    subtree = [count_words(n, k) - 1 for k in range(max_len + 1)]  # proper extensions of length <= k
    report = AgreementReport(max_len)

    def verdict(frontier, cut):
        if any(c.state in A.terminals and M.is_identity(c.register) for c in frontier):
            return True
        return None if cut else False

    by_letter: dict = {}
    for e in A.edges:
        if e.word:
            by_letter.setdefault((e.src, e.word[0]), []).append(e)
    has_epsilon = any(not e.word for e in A.edges)
    cap = bounds.max_register_size

    def advance(frontier, x):
        nxt, cut = set(), False
        for c in frontier:
            for e in by_letter.get((c.state, x), ()):
                reg = M._mul(c.register, e.label)
                if M.is_dead(reg):
                    continue
                if M.size(reg) > cap:
                    cut = True
                    continue
                nxt.add(Configuration(e.dst, reg))
        if not has_epsilon:
            return frozenset(nxt), cut
        closed, cut2 = epsilon_closure(A, nxt, bounds)
        return frozenset(closed), cut or cut2

    memo: dict = {}

    def visit(frontier, cut, ostate, remaining):
        # returns (agreed, disagreement suffixes, truncated suffixes) for the subtree
        key = (frontier, cut, ostate, remaining)
        if key in memo:
            return memo[key]
        got = verdict(frontier, cut)
        expected = ostate is not None and oracle.accepts(ostate)
        agreed, bad, trunc = 0, [], []
        if got is None:
            trunc.append(())
        elif got == expected:
            agreed += 1
        else:
            bad.append(((), got, expected))
        if remaining and not frontier and not cut and ostate is None:
            agreed += subtree[remaining]
        elif remaining:
            for x in letters:
                f2, c2 = advance(frontier, x)
                o2 = None if ostate is None else oracle.step(ostate, x)
                a, b, t = visit(f2, cut or c2, o2, remaining - 1)
                agreed += a
                bad.extend(((x,) + w, g, e) for w, g, e in b)
                trunc.extend((x,) + w for w in t)
        memo[key] = (agreed, bad, trunc)
        return memo[key]

    start, cut = epsilon_closure(A, [Configuration(A.initial, M.identity)], bounds)
    agreed, bad, trunc = visit(frozenset(start), cut, oracle.start(), max_len)
    report.total = subtree[max_len] + 1
    report.agreed = agreed
    report.disagreements = sorted(bad, key=lambda d: (len(d[0]), d[0]))
    report.truncated = sorted(trunc, key=lambda w: (len(w), w))
    return report


def terminal_to_terminal_identity_words(A: DeterministicMAutomaton, max_len: int) -> set[Word]:
    """Words ``w`` with ``(1, w)`` labelling a path between two terminal states."""
    out: set[Word] = set()
    words = list(enumerate_words(A.alphabet, max_len))
    for t in sorted(A.terminals):
        bitmap = acceptance_bitmap(A, max_len, start=t)
        out.update(w for w, b in zip(words, bitmap) if b)
    return out


# ---------------------------------------------------------------------------
# product-preserving rewrites


def regauge(A: MAutomaton, potentials: dict[int, object]) -> MAutomaton:
    """Relabel each edge ``p -g-> q`` as ``c_p^-1 g c_q`` for units ``c``.

    The product along any path from p to q changes to ``c_p^-1 (product) c_q``,
    so acceptance is unchanged when the initial and terminal states carry the
    identity.
    """
    M = A.monoid
    for q in {A.initial} | set(A.terminals):
        if not M.is_identity(potentials.get(q, M.identity)):
            raise AutomatonError("initial and terminal states must carry the identity")
    c = {q: potentials.get(q, M.identity) for q in range(A.n_states)}
    edges = [replace(e, label=M.product([M.inverse(c[e.src]), e.label, c[e.dst]])) for e in A.edges]
    return replace(A, edges=tuple(edges))


def subdivide_edges(A: MAutomaton, factor: Callable[[object], tuple[object, object]]) -> MAutomaton:
    """Split every edge ``p -(g, w)-> q`` into ``p -(g1, w)-> m -(g2, e)-> q`` with ``g = g1 g2``."""
    M = A.monoid
    edges = []
    n = A.n_states
    for e in A.edges:
        g1, g2 = factor(e.label)
        if M._mul(g1, g2) != e.label:
            raise AutomatonError("factorisation does not preserve the label")
        edges.append(Edge(e.src, g1, e.word, n))
        edges.append(Edge(n, g2, (), e.dst))
        n += 1
    return MAutomaton(M, A.alphabet, n, A.initial, A.terminals, tuple(edges))
