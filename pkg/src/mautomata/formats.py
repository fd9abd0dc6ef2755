"""Line-oriented text formats for automata, scenarios and pushdown automata.

Automaton::

    dautomaton                  # or "automaton" (nondeterministic)
    monoid = free-abelian(1)
    alphabet = a,A
    inv a A
    states = 2
    initial = 0
    terminals = 0
    edge 0 1 [0] a              # edge <src> <dst> <element literal> <word|e>

Scenario::

    scenario z-2z
    group = free-abelian(1)
    alphabet = a,A
    inv a A
    letters = [a: [1]; A: [-1]]
    subgroup = parity
    monoid = free-abelian(1)
    phi "aa" = [1]
    max_len = 14

Pushdown automaton::

    pda
    alphabet = a,b
    inv a b
    stack = s
    states = 2
    initial = 0
    finals = 0,1
    trans 0 1 b pop s           # trans <src> <dst> <letter|e> push x | pop x | none
"""
from __future__ import annotations

import re
from dataclasses import dataclass, fields
from pathlib import Path

from .automata import AutomatonError, DeterministicMAutomaton, Edge, MAutomaton
from .constructions import Bounds, EmbeddingSpec
from .gallery import PDATransition, PushdownAutomaton
from .groups import (
    GroupError,
    GroupOracle,
    InvolutiveAlphabet,
    SubgroupOracle,
    as_word,
    parse_group,
    parse_letter_images,
    subgroup_from_predicate,
    word_str,
)
from .monoids import Monoid, MonoidError, parse_descriptor


class FormatError(ValueError):
    def __init__(self, problems: list[tuple[int, str]]):
        self.problems = problems
        super().__init__("\n".join(f"line {n}: {msg}" for n, msg in problems))


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line


_SETTING = re.compile(r"([a-z_]+)\s*=\s*(.*)$")


class _Reader:
    """Shared header handling: settings, alphabet and involution lines."""

    def __init__(self, text: str, keywords: tuple[str, ...]):
        self.problems: list[tuple[int, str]] = []
        self.settings: dict[str, tuple[int, str]] = {}
        self.inv: list[tuple[int, str, str]] = []
        self.body: list[tuple[int, list[str], str]] = []
        self.keyword = None
        self.name = ""
        for n, line in _lines(text):
            if self.keyword is None:
                head, _, rest = line.partition(" ")
                if head not in keywords:
                    self.problems.append((n, f"expected one of {', '.join(keywords)}, got {head!r}"))
                    return
                self.keyword, self.name = head, rest.strip()
                continue
            m = _SETTING.match(line)
            if m and not line.startswith(("edge ", "trans ", "phi ")):
                key = m.group(1)
                if key in self.settings:
                    self.problems.append((n, f"duplicate setting {key!r}"))
                self.settings[key] = (n, m.group(2).strip())
                continue
            tokens = line.split()
            if tokens[0] == "inv":
                if len(tokens) != 3:
                    self.problems.append((n, "expected 'inv <letter> <letter>'"))
                else:
                    self.inv.append((n, tokens[1], tokens[2]))
                continue
            self.body.append((n, tokens, line))
        if self.keyword is None:
            self.problems.append((1, "empty file"))

    def error(self, n: int, msg: str):
        self.problems.append((n, msg))

    def get(self, key: str, required: bool = True) -> tuple[int, str] | None:
        if key not in self.settings:
            if required:
                self.error(0, f"missing setting {key!r}")
            return None
        return self.settings[key]

    def get_int(self, key: str, required: bool = True) -> int | None:
        got = self.get(key, required)
        if got is None:
            return None
        n, value = got
        if not re.fullmatch(r"\d+", value):
            self.error(n, f"{key} must be a non-negative integer, got {value!r}")
            return None
        return int(value)

    def get_int_list(self, key: str) -> list[int] | None:
        got = self.get(key)
        if got is None:
            return None
        n, value = got
        items = [v.strip() for v in value.split(",") if v.strip()]
        if not all(v.isdigit() for v in items):
            self.error(n, f"{key} must be a comma-separated list of states")
            return None
        return [int(v) for v in items]

    def alphabet(self) -> InvolutiveAlphabet | None:
        got = self.get("alphabet")
        if got is None:
            return None
        n, value = got
        letters = [v.strip() for v in value.split(",")]
        try:
            return InvolutiveAlphabet.from_pairs(letters, [(x, y) for _, x, y in self.inv])
        except GroupError as exc:
            line = self.inv[0][0] if self.inv else n
            self.error(line, f"alphabet is not closed under involution: {exc}")
            return None

    def monoid(self, key: str = "monoid") -> Monoid | None:
        got = self.get(key)
        if got is None:
            return None
        n, value = got
        try:
            return parse_group(value) if key == "group" else parse_descriptor(value)
        except (MonoidError, GroupError) as exc:
            self.error(n, str(exc))
            return None

    def raise_if_problems(self):
        if self.problems:
            raise FormatError(sorted(self.problems))


# ---------------------------------------------------------------------------
# automata


def parse_automaton(text: str) -> MAutomaton:
    r = _Reader(text, ("automaton", "dautomaton"))
    r.raise_if_problems()
    deterministic = r.keyword == "dautomaton"
    M = r.monoid()
    alphabet = r.alphabet()
    n_states = r.get_int("states")
    initial = r.get_int("initial")
    terminals = r.get_int_list("terminals")
    edges: list[Edge] = []
    seen: dict[tuple[int, str], int] = {}
    for n, tokens, _ in r.body:
        if tokens[0] != "edge":
            r.error(n, f"unexpected line starting with {tokens[0]!r}")
            continue
        if len(tokens) < 5:
            r.error(n, "expected 'edge <src> <dst> <element> <word>'")
            continue
        src, dst = tokens[1], tokens[2]
        if not (src.isdigit() and dst.isdigit()):
            r.error(n, "edge endpoints must be state numbers")
            continue
        src, dst = int(src), int(dst)
        if n_states is not None and not (src < n_states and dst < n_states):
            r.error(n, f"edge endpoint out of range 0..{n_states - 1}")
        word = as_word(tokens[-1])
        if alphabet is not None:
            bad = [x for x in word if x not in alphabet.involution]
            if bad:
                r.error(n, f"unknown letter {bad[0]!r}")
                continue
        if deterministic:
            if len(word) != 1:
                r.error(n, f"deterministic edges read exactly one letter, got {word_str(word)!r}")
                continue
            key = (src, word[0])
            if key in seen:
                r.error(n, f"determinism violation: second edge from state {src} on {word[0]!r} (first at line {seen[key]})")
                continue
            seen[key] = n
        if M is None:
            continue
        literal = " ".join(tokens[3:-1])
        try:
            label = M.parse(literal)
        except MonoidError as exc:
            r.error(n, str(exc))
            continue
        edges.append(Edge(src, label, word, dst))
    r.raise_if_problems()
    cls = DeterministicMAutomaton if deterministic else MAutomaton
    try:
        return cls(M, alphabet, n_states, initial, frozenset(terminals), tuple(edges))
    except AutomatonError as exc:
        raise FormatError([(0, str(exc))]) from None


def format_automaton(A: MAutomaton) -> str:
    M = A.monoid
    lines = [
        "dautomaton" if A.deterministic else "automaton",
        f"monoid = {M.describe()}",
        "alphabet = " + ",".join(A.alphabet.letters),
    ]
    lines += [f"inv {x} {y}" for x, y in A.alphabet.pairs()]
    lines += [
        f"states = {A.n_states}",
        f"initial = {A.initial}",
        "terminals = " + ",".join(str(q) for q in sorted(A.terminals)),
    ]
    lines += [f"edge {e.src} {e.dst} {M.format(e.label)} {word_str(e.word)}" for e in A.edges]
    return "\n".join(lines) + "\n"


def load_automaton(path: str | Path) -> MAutomaton:
    return parse_automaton(Path(path).read_text())


# ---------------------------------------------------------------------------
# scenarios


@dataclass
class Scenario:
    name: str
    oracle: GroupOracle
    subgroup: SubgroupOracle
    monoid: Monoid
    phi_generators: dict
    bounds: Bounds

    def embedding(self) -> EmbeddingSpec:
        return EmbeddingSpec(self.subgroup, self.monoid, self.phi_generators)


_PHI = re.compile(r'phi\s+"([^"]*)"\s*=\s*(.+)$')
_BOUND_KEYS = {f.name for f in fields(Bounds)}


def parse_scenario(text: str) -> Scenario:
    r = _Reader(text, ("scenario",))
    r.raise_if_problems()
    group = r.monoid("group")
    alphabet = r.alphabet()
    M = r.monoid("monoid")
    oracle = subgroup = None
    if group is not None and alphabet is not None:
        n, value = r.get("letters") or (0, "")
        try:
            images = parse_letter_images(group, alphabet, value)
            oracle = GroupOracle(group, alphabet, images)
        except GroupError as exc:
            r.error(n, str(exc))
    got = r.get("subgroup")
    if oracle is not None and got is not None:
        try:
            subgroup = subgroup_from_predicate(oracle, got[1])
        except GroupError as exc:
            r.error(got[0], str(exc))
    bounds = {}
    for key in _BOUND_KEYS:
        value = r.get_int(key, required=False)
        if value is not None:
            bounds[key] = value
    for key, (n, _) in r.settings.items():
        if key not in _BOUND_KEYS | {"group", "alphabet", "letters", "subgroup", "monoid"}:
            r.error(n, f"unknown setting {key!r}")
    phi = {}
    for n, tokens, line in r.body:
        m = _PHI.match(line)
        if not m:
            r.error(n, f"unexpected line starting with {tokens[0]!r}")
            continue
        if M is None:
            continue
        try:
            phi[as_word(m.group(1))] = M.parse(m.group(2))
        except MonoidError as exc:
            r.error(n, str(exc))
    r.raise_if_problems()
    try:
        b = Bounds(**bounds)
    except ValueError as exc:
        raise FormatError([(0, str(exc))]) from None
    return Scenario(r.name or "scenario", oracle, subgroup, M, phi, b)


def format_scenario(s: Scenario) -> str:
    G, A = s.oracle.group, s.oracle.alphabet
    lines = [f"scenario {s.name}", f"group = {G.describe()}", "alphabet = " + ",".join(A.letters)]
    lines += [f"inv {x} {y}" for x, y in A.pairs()]
    lines.append("letters = [" + "; ".join(f"{x}: {G.format(s.oracle.letter_images[x])}" for x in A.letters) + "]")
    lines.append(f"subgroup = {s.subgroup.name}")
    lines.append(f"monoid = {s.monoid.describe()}")
    lines += [f'phi "{word_str(w)}" = {s.monoid.format(m)}' for w, m in s.phi_generators.items()]
    lines += [f"{f.name} = {getattr(s.bounds, f.name)}" for f in fields(Bounds)]
    return "\n".join(lines) + "\n"


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(Path(path).read_text())


# ---------------------------------------------------------------------------
# pushdown automata


def parse_pda(text: str) -> PushdownAutomaton:
    r = _Reader(text, ("pda",))
    r.raise_if_problems()
    alphabet = r.alphabet()
    got = r.get("stack")
    stack = tuple(v.strip() for v in got[1].split(",")) if got else ()
    n_states = r.get_int("states")
    initial = r.get_int("initial")
    finals = r.get_int_list("finals")
    trans = []
    for n, tokens, _ in r.body:
        if tokens[0] != "trans" or len(tokens) not in (5, 6):
            r.error(n, "expected 'trans <src> <dst> <letter|e> push x | pop x | none'")
            continue
        _, src, dst, word, action, *rest = tokens
        if not (src.isdigit() and dst.isdigit()):
            r.error(n, "transition endpoints must be state numbers")
            continue
        letter = rest[0] if rest else None
        if (action == "none") != (letter is None) or action not in ("push", "pop", "none"):
            r.error(n, f"bad stack action {' '.join([action] + rest)!r}")
            continue
        if letter is not None and letter not in stack:
            r.error(n, f"unknown stack letter {letter!r}")
            continue
        trans.append(PDATransition(int(src), as_word(word), action, letter, int(dst)))
    r.raise_if_problems()
    try:
        return PushdownAutomaton(alphabet, stack, n_states, initial, frozenset(finals), tuple(trans))
    except ValueError as exc:
        raise FormatError([(0, str(exc))]) from None


def format_pda(P: PushdownAutomaton) -> str:
    lines = ["pda", "alphabet = " + ",".join(P.alphabet.letters)]
    lines += [f"inv {x} {y}" for x, y in P.alphabet.pairs()]
    lines += [
        "stack = " + ",".join(P.stack_letters),
        f"states = {P.n_states}",
        f"initial = {P.initial}",
        "finals = " + ",".join(str(q) for q in sorted(P.finals)),
    ]
    for t in P.transitions:
        action = t.action if t.stack_letter is None else f"{t.action} {t.stack_letter}"
        lines.append(f"trans {t.src} {t.dst} {word_str(t.word)} {action}")
    return "\n".join(lines) + "\n"


def load_pda(path: str | Path) -> PushdownAutomaton:
    return parse_pda(Path(path).read_text())
