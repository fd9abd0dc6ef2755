"""Both directions of the embedding theorem for deterministic M-automata.

* :func:`schreier_construct` turns a finite-index subgroup ``K`` of ``H`` and
  an embedding ``phi: K -> G(M)`` into a deterministic M-automaton accepting
  the word problem of ``H`` (Schreier coset graph, registers carry
  ``phi`` of the Schreier generators).
* :func:`extract_embedding` goes the other way: from a deterministic
  M-automaton accepting the word problem it recovers the subgroup ``K`` of
  words read between terminal states, bounds its index by the number of
  accessible states, and tabulates ``sigma: K -> G(M)`` on a bounded sample,
  checking that it is a well-defined injective homomorphism into the units.

All checks over infinite objects are exhaustive only up to explicit bounds.
"""
from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .automata import (
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
)
from .groups import (
    CosetTable,
    GroupOracle,
    SubgroupOracle,
    Word,
    coset_enumerate,
    enumerate_words,
    formal_inverse,
    word_str,
)
from .monoids import Monoid
from .report import FAIL, INCONCLUSIVE, PASS, Report

log = logging.getLogger(__name__)

UNSUPPORTED = "unsupported-premise"


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class Bounds:
    max_len: int = 10
    max_register_size: int = 12
    max_cosets: int = 64
    sample_len: int = 8
    search_len: int = 10
    alt_len: int = 6
    max_configurations: int = 20000
    max_pairs: int = 4000

    def __post_init__(self):
        for name, value in vars(self).items():
            if value <= 0:
                raise ValueError(f"bound {name} must be positive, got {value}")

    def run_bounds(self) -> RunBounds:
        return RunBounds(self.max_configurations, self.max_register_size)


# ---------------------------------------------------------------------------
# embeddings given on generators


class EmbeddingSpec:
    """A homomorphism ``phi: K -> G(M)`` given on generator words lying in ``K``.

    ``phi`` is extended multiplicatively by a breadth-first search over
    products of the generators; while searching, two products of equal
    group value with different images (not a homomorphism) or a
    non-identity element sent to 1 (not injective) raise
    :class:`EmbeddingError`.
    """

    def __init__(self, subgroup: SubgroupOracle, target_monoid: Monoid, phi_generators: dict, max_nodes: int = 20000):
        self.subgroup = subgroup
        self.target = target_monoid
        self.max_nodes = max_nodes
        H = subgroup.parent
        M = target_monoid
        self.generators: list[tuple[Word, object, object]] = []
        for w, m in phi_generators.items():
            w = H.alphabet.check_word(w)
            h = H.evaluate(w)
            if not subgroup.contains(h):
                raise EmbeddingError(f"phi generator {word_str(w)!r} does not lie in the subgroup")
            if not M.contains(m):
                raise EmbeddingError(f"phi({word_str(w)}) is not an element of {M.describe()}")
            if M.try_two_sided_inverse(m) is None:
                raise EmbeddingError(f"phi({word_str(w)}) = {M.format(m)} is not a unit")
            self.generators.append((w, h, m))
        self._steps = []
        for _, h, m in self.generators:
            self._steps.append((h, m))
            self._steps.append((H.inverse(h), M.inverse(m)))
        self._values = {H.identity: M.identity}
        self._queue = deque([H.identity])

    @property
    def parent(self) -> GroupOracle:
        return self.subgroup.parent

    def _expand(self) -> bool:
        if not self._queue:
            return False
        H, M = self.parent, self.target
        h = self._queue.popleft()
        m = self._values[h]
        for gh, gm in self._steps:
            h2 = H.multiply(h, gh)
            m2 = M._mul(m, gm)
            known = self._values.get(h2)
            if known is None:
                if M.is_identity(m2) and not H.is_identity(h2):
                    raise EmbeddingError(f"phi is not injective: {H.group.format(h2)} maps to the identity")
                self._values[h2] = m2
                self._queue.append(h2)
            elif known != m2:
                raise EmbeddingError(f"phi is not a homomorphism: two products reach {H.group.format(h2)}")
        return True

    def phi(self, h):
        """Image of the subgroup element ``h``; raises if it cannot be expressed."""
        if not self.subgroup.contains(h):
            raise EmbeddingError(f"{self.parent.group.format(h)} is not in the subgroup")
        while h not in self._values:
            if len(self._values) > self.max_nodes or not self._expand():
                raise EmbeddingError(
                    f"cannot express {self.parent.group.format(h)} through the phi generators"
                )
        return self._values[h]

    def phi_word(self, w: Sequence[str]):
        return self.phi(self.parent.evaluate(w))


def schreier_construct(H: GroupOracle, spec: EmbeddingSpec, max_cosets: int) -> DeterministicMAutomaton:
    """Deterministic automaton on the right cosets of ``K`` accepting the word problem of ``H``.

    The state of a word ``w`` is the coset ``K w``; the edge from coset ``i``
    on ``x`` to ``j`` carries ``phi(r_i x r_j^-1)``, so the register after
    reading ``w`` into coset ``j`` is ``phi(w r_j^-1)``.
    """
    if spec.parent is not H:
        raise EmbeddingError("the embedding is over a different group oracle")
    table = coset_enumerate(spec.subgroup, max_cosets)
    if not table.complete:
        raise EmbeddingError(f"subgroup index exceeds max_cosets={max_cosets}")
    return automaton_from_table(H, spec, table)


def automaton_from_table(H: GroupOracle, spec: EmbeddingSpec, table: CosetTable) -> DeterministicMAutomaton:
    M = spec.target
    reps = [H.evaluate(r) for r in table.representatives]
    edges = []
    for i, row in enumerate(table.transitions):
        for x in H.alphabet.letters:
            j = row[x]
            h = H.multiply(H.multiply(reps[i], H.letter_images[x]), H.inverse(reps[j]))
            edges.append(Edge(i, spec.phi(h), (x,), j))
    return DeterministicMAutomaton(M, H.alphabet, table.index, 0, frozenset([0]), tuple(edges))


# ---------------------------------------------------------------------------
# extraction


def check_initial_is_terminal(A: MAutomaton) -> bool:
    return A.initial in A.terminals


@dataclass
class TerminalUsage:
    state: int
    witness: Word | None
    status: str  # "certified" or "removed-unverified"


@dataclass
class PruneReport:
    usage: list[TerminalUsage]
    changed_words: list[Word] = field(default_factory=list)

    @property
    def removed(self) -> list[int]:
        return [u.state for u in self.usage if u.status != "certified"]


def terminal_usage_prune(A: DeterministicMAutomaton, bounds: Bounds = Bounds()) -> tuple[DeterministicMAutomaton, PruneReport]:
    """Keep only terminals reached from the initial state with register 1.

    Terminals without a witness inside the bounds are dropped and flagged:
    a bounded search cannot prove that a terminal is never used.
    """
    usage = []
    kept = set()
    for q in sorted(A.terminals):
        w = find_identity_register_path(A, A.initial, q, bounds.run_bounds(), max_len=bounds.search_len)
        if w is None:
            log.warning("terminal %d has no (1, w) witness within bounds; removed unverified", q)
            usage.append(TerminalUsage(q, None, "removed-unverified"))
        else:
            kept.add(q)
            usage.append(TerminalUsage(q, w, "certified"))
    pruned = A.with_terminals(kept)
    report = PruneReport(usage)
    if kept != set(A.terminals):
        before = acceptance_bitmap(A, bounds.max_len)
        after = acceptance_bitmap(pruned, bounds.max_len)
        words = enumerate_words(A.alphabet, bounds.max_len)
        report.changed_words = [w for w, a, b in zip(words, before, after) if a != b]
    return pruned, report


@dataclass(frozen=True)
class AccessibleWitness:
    state: int
    register: object
    word: Word
    inverse_word: Word


def compute_accessible_witnesses(A: DeterministicMAutomaton) -> list[AccessibleWitness]:
    """Breadth-first witness ``(g_q, w_q, v_q)`` for each accessible state, in discovery order."""
    M = A.monoid
    found = {A.initial: AccessibleWitness(A.initial, M.identity, (), ())}
    queue = deque([A.initial])
    while queue:
        q = queue.popleft()
        wq = found[q]
        for x in A.alphabet.letters:
            e = A.step(q, x)
            if e is None or e.dst in found:
                continue
            w = wq.word + (x,)
            found[e.dst] = AccessibleWitness(e.dst, M._mul(wq.register, e.label), w, formal_inverse(A.alphabet, w))
            queue.append(e.dst)
    return list(found.values())


@dataclass
class CosetPartition:
    classes: list[list[int]]
    merges: list[tuple[int, int, Word]] = field(default_factory=list)
    separated: list[tuple[int, int]] = field(default_factory=list)
    unresolved: list[tuple[int, int]] = field(default_factory=list)

    @property
    def index_estimate(self) -> int:
        return len(self.classes)

    def class_of(self, q: int) -> int:
        for k, cls in enumerate(self.classes):
            if q in cls:
                return k
        raise KeyError(q)


def coset_partition(
    A: DeterministicMAutomaton, H: GroupOracle, witnesses: list[AccessibleWitness], bounds: Bounds = Bounds()
) -> CosetPartition:
    """Group accessible states by the coset of ``K`` their witness words lie in.

    States ``p`` and ``q`` are merged when some word read between terminal
    states represents ``w_p w_q^-1`` in ``H`` (first the word ``w_p v_q``
    itself, then every word up to ``bounds.alt_len`` with the same value).
    Merging is sound, so the class count bounds the index from above.  Two
    classes are reported ``separated`` when representing words exist up to
    the bound but none is read between terminals, and ``unresolved`` when no
    representing word was found at all.
    """
    states = [w.state for w in witnesses]
    missing = A.missing_transitions(states)
    if missing:
        raise AutomatonError(f"transition function is incomplete on accessible states, e.g. {missing[0]}")
    J = between_terminal_fa(A)
    wit = {w.state: w for w in witnesses}
    parent = {q: q for q in states}

    def find(q):
        while parent[q] != q:
            parent[q] = parent[parent[q]]
            q = parent[q]
        return q

    merges = []

    def union(p, q, word):
        rp, rq = find(p), find(q)
        if rp != rq:
            parent[max(rp, rq)] = min(rp, rq)
            merges.append((p, q, word))

    for p, q in itertools.permutations(states, 2):
        if find(p) == find(q):
            continue
        word = wit[p].word + wit[q].inverse_word
        if J.accepts(word):
            union(p, q, word)

    # alternative representatives of w_p w_q^-1, up to alt_len
    by_value: dict = {}
    for w in enumerate_words(H.alphabet, bounds.alt_len):
        by_value.setdefault(H.evaluate(w), []).append(w)
    j_words = J.accepted_words(bounds.alt_len)
    values = {q: H.evaluate(wit[q].word) for q in states}
    separated, unresolved = [], []
    changed = True
    while changed:
        changed = False
        separated, unresolved = [], []
        roots = sorted({find(q) for q in states})
        for p, q in itertools.combinations(roots, 2):
            h = H.multiply(values[p], H.inverse(values[q]))
            candidates = by_value.get(h, [])
            hit = next((w for w in candidates if w in j_words), None)
            if hit is not None:
                union(p, q, hit)
                changed = True
                break
            (separated if candidates else unresolved).append((p, q))
    classes: dict[int, list[int]] = {}
    for q in states:
        classes.setdefault(find(q), []).append(q)
    return CosetPartition([sorted(c) for _, c in sorted(classes.items())], merges, separated, unresolved)


@dataclass(frozen=True)
class SigmaWitness:
    word: Word
    register: object
    src: int
    dst: int


@dataclass
class EmbeddingReport:
    """Everything recovered from a deterministic automaton, plus verdicts."""

    prune: PruneReport | None = None
    witnesses: list[AccessibleWitness] = field(default_factory=list)
    inaccessible: list[int] = field(default_factory=list)
    partition: CosetPartition | None = None
    index_bound: int | None = None
    sigma: dict = field(default_factory=dict)  # group element -> SigmaWitness (canonical)
    sigma_values: dict = field(default_factory=dict)  # group element -> set of registers seen
    report: Report = field(default_factory=lambda: Report("extraction"))

    @property
    def result(self) -> str:
        return self.report.result


def sigma_sample(A: DeterministicMAutomaton, H: GroupOracle, witnesses: list[AccessibleWitness], sample_len: int):
    """Paths between terminal states labelled ``(g, w)``.

    The sample is every word up to ``sample_len`` read from a terminal to a
    terminal, plus the Schreier-generator words ``w_p x v_p'``.
    """
    M = A.monoid
    out: list[SigmaWitness] = []
    problems = []
    for a in sorted(A.terminals):
        level = [((), a, M.identity)]
        for depth in range(sample_len + 1):
            nxt = []
            for w, q, reg in level:
                if q in A.terminals:
                    out.append(SigmaWitness(w, reg, a, q))
                if depth == sample_len:
                    continue
                for x in A.alphabet.letters:
                    e = A.step(q, x)
                    if e is not None:
                        nxt.append((w + (x,), e.dst, M._mul(reg, e.label)))
            level = nxt
    wit = {w.state: w for w in witnesses}
    for p in wit.values():
        for x in A.alphabet.letters:
            e = A.step(p.state, x)
            if e is None or e.dst not in wit:
                continue
            word = p.word + (x,) + wit[e.dst].inverse_word
            q, reg = A.initial, M.identity
            for y in word:
                step = A.step(q, y)
                if step is None:
                    q = None
                    break
                q, reg = step.dst, M._mul(reg, step.label)
            if q in A.terminals:
                out.append(SigmaWitness(word, reg, A.initial, q))
            else:
                problems.append(word)
    return out, problems


def extract_sigma(
    A: DeterministicMAutomaton,
    H: GroupOracle,
    witnesses: list[AccessibleWitness],
    bounds: Bounds = Bounds(),
    report: Report | None = None,
) -> tuple[dict, dict, Report]:
    """Tabulate ``sigma`` on a bounded sample of ``K`` and check its properties."""
    M = A.monoid
    report = report or Report("sigma")
    sample, problems = sigma_sample(A, H, witnesses, bounds.sample_len)
    report.add(
        "schreier-words-between-terminals",
        not problems,
        f"{len(problems)} generator words not read between terminals" if problems else "",
    )
    values: dict = {}
    canonical: dict = {}
    by_ends: dict = {}  # group element -> {(src, dst): shortest witness}
    for s in sample:
        h = H.evaluate(s.word)
        values.setdefault(h, set()).add(s.register)
        cur = canonical.get(h)
        if cur is None or (len(s.word), s.word) < (len(cur.word), cur.word):
            canonical[h] = s
        ends = by_ends.setdefault(h, {})
        cur = ends.get((s.src, s.dst))
        if cur is None or (len(s.word), s.word) < (len(cur.word), cur.word):
            ends[(s.src, s.dst)] = s
    report.info.append(f"sigma sample: {len(sample)} paths, {len(canonical)} subgroup elements")

    bad = [h for h, regs in values.items() if len(regs) > 1]
    report.add(
        "well-defined",
        not bad,
        f"{len(bad)} elements with several registers" if bad else f"{len(values)} elements",
    )

    # homomorphism: sigma(j) sigma(k) = sigma(jk), through a connecting (1, q) path
    connectors: dict = {}

    def connector(p, q):
        if (p, q) not in connectors:
            connectors[(p, q)] = find_identity_register_path(A, p, q, bounds.run_bounds(), max_len=bounds.search_len)
        return connectors[(p, q)]

    keys = list(canonical)
    pairs = list(itertools.product(keys, repeat=2))
    truncated = len(pairs) > bounds.max_pairs
    pairs = pairs[: bounds.max_pairs]
    hom_fail, hom_unknown = [], []
    for h1, h2 in pairs:
        # any witnesses of h1 and h2 joined by a (1, q) path will do
        found = None
        for j in sorted(by_ends[h1].values(), key=lambda s: (len(s.word), s.word)):
            for k in sorted(by_ends[h2].values(), key=lambda s: (len(s.word), s.word)):
                q = connector(j.dst, k.src)
                if q is not None:
                    found = (j, q, k)
                    break
            if found:
                break
        if found is None:
            hom_unknown.append((h1, h2))
            continue
        j, q, k = found
        word = j.word + q + k.word
        state, reg = j.src, M.identity
        for y in word:
            e = A.step(state, y)
            if e is None:
                state = None
                break
            state, reg = e.dst, M._mul(reg, e.label)
        expected = M._mul(j.register, k.register)
        h12 = H.multiply(h1, h2)
        if state != k.dst or reg != expected or (h12 in canonical and canonical[h12].register != expected):
            hom_fail.append((h1, h2))
    status = FAIL if hom_fail else (INCONCLUSIVE if hom_unknown else PASS)
    detail = f"{len(pairs)} pairs, {len(hom_fail)} failures, {len(hom_unknown)} without connecting path"
    if truncated:
        detail += f" (capped at {bounds.max_pairs})"
    report.add("homomorphism", status, detail)

    inj_fail = []
    for h, s in canonical.items():
        if M.is_identity(s.register) and not (H.in_word_problem(s.word) and det_accepts(A, s.word)):
            inj_fail.append(s.word)
    report.add(
        "injective",
        not inj_fail,
        f"counterexample {word_str(inj_fail[0])}" if inj_fail else "sigma = 1 only on the identity",
    )

    non_units = [g for regs in values.values() for g in regs if M.try_two_sided_inverse(g) is None]
    report.add("units", not non_units, f"{len(non_units)} non-unit registers" if non_units else "")
    return canonical, values, report


def extract_embedding(A: DeterministicMAutomaton, H: GroupOracle, bounds: Bounds = Bounds()) -> EmbeddingReport:
    """Full extraction pipeline: premise, pruning, witnesses, cosets, sigma."""
    out = EmbeddingReport()
    rep = out.report
    if A.alphabet.letters != H.alphabet.letters or A.alphabet.involution != H.alphabet.involution:
        raise EmbeddingError("automaton and group oracle use different alphabets")
    agreement = language_agreement(A, H.in_word_problem, bounds.max_len)
    premise = agreement.ok
    rep.add(
        "premise-accepts-word-problem",
        premise,
        f"{agreement.total} words up to length {bounds.max_len}, {len(agreement.disagreements)} disagreements"
        + (f", first {word_str(agreement.first_disagreement)}" if agreement.disagreements else ""),
    )
    rep.add("initial-is-terminal", check_initial_is_terminal(A))

    A2, out.prune = terminal_usage_prune(A, bounds)
    unverified = out.prune.removed
    rep.add(
        "terminal-usage",
        PASS if not unverified else INCONCLUSIVE,
        f"removed unverified: {unverified}" if unverified else f"{len(A2.terminals)} terminals certified",
    )
    if not A2.terminals:
        rep.add("extraction", FAIL, "no usable terminal state")
        return out

    out.witnesses = compute_accessible_witnesses(A2)
    accessible = {w.state for w in out.witnesses}
    out.inaccessible = [q for q in range(A2.n_states) if q not in accessible]
    for w in out.witnesses:
        rep.info.append(f"witness q{w.state}: g={A.monoid.format(w.register)} w={word_str(w.word)} v={word_str(w.inverse_word)}")

    try:
        out.partition = coset_partition(A2, H, out.witnesses, bounds)
    except AutomatonError as exc:
        rep.add("index", INCONCLUSIVE, str(exc))
    else:
        part = out.partition
        out.index_bound = part.index_estimate
        rep.info.append("coset classes: " + " ".join("{" + ",".join(map(str, c)) + "}" for c in part.classes))
        ok = part.index_estimate <= len(accessible)
        status = FAIL if not ok else (INCONCLUSIVE if part.unresolved else PASS)
        rep.add(
            "index",
            status,
            f"{part.index_estimate} classes <= {len(accessible)} accessible states; "
            f"{len(part.separated)} pairs separated to length {bounds.alt_len}, {len(part.unresolved)} unresolved",
        )

    canonical, values, _ = extract_sigma(A2, H, out.witnesses, bounds, rep)
    out.sigma, out.sigma_values = canonical, values
    for h, s in sorted(canonical.items(), key=lambda kv: (len(kv[1].word), kv[1].word))[:12]:
        rep.info.append(f"sigma {word_str(s.word)} -> {A.monoid.format(s.register)}")

    if not premise:
        for v in rep.verdicts[1:]:
            if v.status == PASS:
                v.status = UNSUPPORTED
    return out


# ---------------------------------------------------------------------------
# round trip


@dataclass
class TheoremReport:
    automaton: DeterministicMAutomaton | None
    coset_count: int | None
    extraction: EmbeddingReport | None
    report: Report

    @property
    def result(self) -> str:
        return self.report.result


def verify_main_theorem(H: GroupOracle, M: Monoid, spec: EmbeddingSpec, bounds: Bounds = Bounds()) -> TheoremReport:
    """Construct from the embedding, check the word problem, extract back."""
    rep = Report(f"theorem round trip for {H.group.describe()} with register {M.describe()}")
    if spec.target != M:
        raise EmbeddingError("embedding targets a different monoid")
    table = coset_enumerate(spec.subgroup, bounds.max_cosets)
    if not table.complete:
        rep.add("coset-enumeration", FAIL, f"index exceeds {bounds.max_cosets}")
        return TheoremReport(None, None, None, rep)
    problems = table.check(spec.subgroup)
    rep.add("coset-table", not problems, problems[0] if problems else f"index {table.index}")
    try:
        A = automaton_from_table(H, spec, table)
    except EmbeddingError as exc:
        rep.add("construction", FAIL, str(exc))
        return TheoremReport(None, table.index, None, rep)
    rep.add("construction", True, f"{A.n_states} states, deterministic and complete")
    agreement = language_agreement(A, H.in_word_problem, bounds.max_len)
    rep.add(
        "converse-accepts-word-problem",
        agreement.ok,
        f"{agreement.total} words up to length {bounds.max_len}, {len(agreement.disagreements)} disagreements",
    )
    extraction = extract_embedding(A, H, bounds)
    rep.extend(extraction.report, prefix="forward-")
    if extraction.index_bound is not None:
        rep.add(
            "forward-index-vs-cosets",
            extraction.index_bound <= table.index,
            f"extracted {extraction.index_bound}, constructed from {table.index} cosets",
        )
    return TheoremReport(A, table.index, extraction, rep)
