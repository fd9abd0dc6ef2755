"""Concrete groups given by faithful representations, and their word problems.

A :class:`GroupOracle` evaluates words over an involutive alphabet into a
group whose identity test is exact (vectors, reduced words, permutations,
affine maps of the integers).  The word problem is the kernel of that
evaluation.  :func:`coset_enumerate` builds the Schreier coset table of a
finite-index subgroup given by a membership predicate.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

from .monoids import (
    EXTRA_KINDS,
    DirectProduct,
    FreeAbelian,
    FreeGroup,
    LiteralSyntaxError,
    Monoid,
    MonoidError,
    SymmetricGroup,
    TrivialMonoid,
    parse_descriptor,
)

Word = tuple[str, ...]


class GroupError(ValueError):
    pass


def as_word(w: str | Sequence[str]) -> Word:
    """Normalise a word; strings are split into single-letter tokens and ``"e"`` is empty."""
    if isinstance(w, str):
        w = w.strip()
        return () if w in ("", "e") else tuple(w)
    return tuple(w)


def word_str(w: Sequence[str]) -> str:
    return "".join(w) or "e"


@dataclass(frozen=True)
class InvolutiveAlphabet:
    """Finite alphabet with a self-inverse involution (formal inverses)."""

    letters: tuple[str, ...]
    involution: dict[str, str] = field(hash=False, compare=True)

    def __post_init__(self):
        if len(set(self.letters)) != len(self.letters):
            raise GroupError(f"duplicate letters in {self.letters}")
        for x in self.letters:
            if len(x) != 1 or x.isspace() or x in ",#=":
                raise GroupError(f"letters must be single printable characters, got {x!r}")
            if x == "e":
                raise GroupError("'e' is reserved for the empty word")
            if x not in self.involution:
                raise GroupError(f"letter {x!r} has no formal inverse")
            y = self.involution[x]
            if y not in self.letters:
                raise GroupError(f"inverse {y!r} of {x!r} is not a letter")
            if self.involution[y] != x:
                raise GroupError(f"involution is not self-inverse at {x!r}")
        if set(self.involution) - set(self.letters):
            raise GroupError("involution mentions letters outside the alphabet")

    @classmethod
    def from_pairs(cls, letters: Iterable[str], pairs: Iterable[tuple[str, str]]) -> "InvolutiveAlphabet":
        inv: dict[str, str] = {}
        for x, y in pairs:
            for a, b in ((x, y), (y, x)):
                if inv.get(a, b) != b:
                    raise GroupError(f"letter {a!r} given two inverses")
                inv[a] = b
        return cls(tuple(letters), inv)

    @classmethod
    def symmetric(cls, generators: str, self_inverse: str = "") -> "InvolutiveAlphabet":
        """``symmetric("ab", "s")`` gives letters a, A, b, B, s with s self-inverse."""
        letters: list[str] = []
        pairs = []
        for g in generators:
            letters += [g, g.upper()]
            pairs.append((g, g.upper()))
        for s in self_inverse:
            letters.append(s)
            pairs.append((s, s))
        return cls.from_pairs(letters, pairs)

    def index(self, letter: str) -> int:
        return self.letters.index(letter)

    def check_word(self, w: Sequence[str]) -> Word:
        w = as_word(w)
        for pos, x in enumerate(w):
            if x not in self.involution:
                raise GroupError(f"letter {x!r} at position {pos} is not in the alphabet")
        return w

    def pairs(self) -> list[tuple[str, str]]:
        seen, out = set(), []
        for x in self.letters:
            if x not in seen:
                out.append((x, self.involution[x]))
                seen.update((x, self.involution[x]))
        return out

    def __len__(self):
        return len(self.letters)


def formal_inverse(alphabet: InvolutiveAlphabet, w: Sequence[str]) -> Word:
    w = alphabet.check_word(w)
    return tuple(alphabet.involution[x] for x in reversed(w))


def enumerate_words(alphabet: InvolutiveAlphabet | Sequence[str], max_len: int) -> Iterator[Word]:
    """All words of length <= max_len in length-lexicographic order (alphabet order)."""
    letters = alphabet.letters if isinstance(alphabet, InvolutiveAlphabet) else tuple(alphabet)
    for n in range(max_len + 1):
        yield from itertools.product(letters, repeat=n)


def count_words(n_letters: int, max_len: int) -> int:
    return sum(n_letters**k for k in range(max_len + 1))


# ---------------------------------------------------------------------------
# infinite dihedral group


@dataclass(frozen=True)
class AffineElement:
    """The map ``x -> sign*x + shift`` of the integers, sign in {+1, -1}."""

    sign: int
    shift: int

    def __call__(self, x: int) -> int:
        return self.sign * x + self.shift


class InfiniteDihedral(Monoid):
    """Affine maps ``x -> ±x + n``; ``a*b`` applies ``a`` first."""

    kind = "dihedral-inf"
    is_group = True
    claims_unique_left_inverses = True

    @property
    def identity(self):
        return AffineElement(1, 0)

    def contains(self, a):
        return isinstance(a, AffineElement) and a.sign in (1, -1)

    def _mul(self, a, b):
        return AffineElement(a.sign * b.sign, b.sign * a.shift + b.shift)

    def try_two_sided_inverse(self, a):
        return AffineElement(a.sign, -a.sign * a.shift)

    def size(self, a):
        return abs(a.shift) + (a.sign < 0)

    def enumerate(self, size_bound):
        out = []
        for n in range(-size_bound, size_bound + 1):
            out.append(AffineElement(1, n))
            if abs(n) + 1 <= size_bound:
                out.append(AffineElement(-1, n))
        return out

    def parse(self, text):
        m = re.fullmatch(r"\s*\(\s*([+-]?1)\s*,\s*([+-]?\d+)\s*\)\s*", text)
        if not m:
            raise LiteralSyntaxError("expected '(±1,n)'", text, 0)
        return AffineElement(int(m.group(1)), int(m.group(2)))

    def format(self, a):
        return f"({a.sign},{a.shift})"

    def describe(self):
        return "dihedral-inf"


EXTRA_KINDS["dihedral-inf"] = InfiniteDihedral


def parse_group(text: str) -> Monoid:
    group = parse_descriptor(text)
    if not group.is_group:
        raise GroupError(f"{text!r} is not a group")
    return group


# ---------------------------------------------------------------------------
# oracles


@dataclass(frozen=True, eq=False)
class GroupOracle:
    """Evaluation homomorphism from words over ``alphabet`` onto a concrete group."""

    group: Monoid
    alphabet: InvolutiveAlphabet
    letter_images: dict

    def __post_init__(self):
        if not self.group.is_group:
            raise GroupError(f"{self.group.describe()} is not a group")
        for x in self.alphabet.letters:
            if x not in self.letter_images:
                raise GroupError(f"letter {x!r} has no image")
            if not self.group.contains(self.letter_images[x]):
                raise GroupError(f"image of {x!r} is not in {self.group.describe()}")
        for x, y in self.alphabet.pairs():
            prod = self.group._mul(self.letter_images[x], self.letter_images[y])
            if not self.group.is_identity(prod):
                raise GroupError(f"images of {x!r} and its inverse {y!r} are not mutually inverse")

    @property
    def kind(self) -> str:
        return self.group.kind

    @property
    def identity(self):
        return self.group.identity

    def evaluate(self, w: Sequence[str]):
        w = self.alphabet.check_word(w)
        g = self.group
        result = g.identity
        for x in w:
            result = g._mul(result, self.letter_images[x])
        return result

    def is_identity(self, h) -> bool:
        return self.group.is_identity(h)

    def multiply(self, a, b):
        return self.group._mul(a, b)

    def inverse(self, a):
        return self.group.try_two_sided_inverse(a)

    def in_word_problem(self, w: Sequence[str]) -> bool:
        return self.group.is_identity(self.evaluate(w))


def evaluate_word(oracle: GroupOracle, w: Sequence[str]):
    return oracle.evaluate(w)


def in_word_problem(oracle: GroupOracle, w: Sequence[str]) -> bool:
    return oracle.in_word_problem(w)


def parity(group: Monoid, h) -> int:
    """The natural sign homomorphism to Z/2 used by the ``parity`` subgroup."""
    if isinstance(group, FreeAbelian):
        return sum(h.vector) % 2
    if isinstance(group, FreeGroup):
        return len(h.word) % 2
    if isinstance(group, SymmetricGroup):
        inversions = sum(1 for i, j in itertools.combinations(range(group.degree), 2) if h.images[i] > h.images[j])
        return inversions % 2
    if isinstance(group, InfiniteDihedral):
        return int(h.sign < 0)
    if isinstance(group, TrivialMonoid):
        return 0
    if isinstance(group, DirectProduct):
        return sum(parity(f, c) for f, c in zip(group.factors, h.components)) % 2
    raise GroupError(f"no parity homomorphism for {group.describe()}")


@dataclass(frozen=True, eq=False)
class SubgroupOracle:
    parent: GroupOracle
    membership: Callable[[object], bool]
    claimed_index_bound: int | None = None
    name: str = "custom"

    def contains(self, h) -> bool:
        return bool(self.membership(h))

    def contains_word(self, w: Sequence[str]) -> bool:
        return self.contains(self.parent.evaluate(w))


def subgroup_from_predicate(oracle: GroupOracle, name: str) -> SubgroupOracle:
    """``parity``, ``trivial`` or ``full``."""
    if name == "full":
        return SubgroupOracle(oracle, lambda h: True, 1, "full")
    if name == "trivial":
        return SubgroupOracle(oracle, oracle.group.is_identity, None, "trivial")
    if name == "parity":
        parity(oracle.group, oracle.identity)  # fail early for unsupported groups
        return SubgroupOracle(oracle, lambda h: parity(oracle.group, h) == 0, 2, "parity")
    raise GroupError(f"unknown subgroup predicate {name!r}")


# ---------------------------------------------------------------------------
# coset tables


@dataclass
class CosetTable:
    """Right cosets ``K r`` with representative words and letter transitions."""

    representatives: list[Word]
    transitions: list[dict[str, int]]
    complete: bool = True

    @property
    def index(self) -> int:
        return len(self.representatives)

    def check(self, subgroup: SubgroupOracle) -> list[str]:
        """Return a list of violated table invariants (empty if consistent)."""
        oracle = subgroup.parent
        alphabet = oracle.alphabet
        problems = []
        if self.representatives[0] != ():
            problems.append("representative 0 is not the empty word")
        reps = [oracle.evaluate(r) for r in self.representatives]
        for i, row in enumerate(self.transitions):
            for x in alphabet.letters:
                if x not in row:
                    problems.append(f"missing transition ({i}, {x})")
                    continue
                j = row[x]
                if self.transitions[j].get(alphabet.involution[x]) != i:
                    problems.append(f"transition ({i}, {x}) -> {j} not undone by {alphabet.involution[x]!r}")
                h = oracle.multiply(oracle.multiply(reps[i], oracle.letter_images[x]), oracle.inverse(reps[j]))
                if not subgroup.contains(h):
                    problems.append(f"rep {i} * {x} is not in coset {j}")
        for i, j in itertools.combinations(range(len(reps)), 2):
            if subgroup.contains(oracle.multiply(reps[i], oracle.inverse(reps[j]))):
                problems.append(f"cosets {i} and {j} coincide")
        return problems


def coset_enumerate(subgroup: SubgroupOracle, max_cosets: int) -> CosetTable:
    """Breadth-first Schreier coset enumeration driven by membership tests.

    If more than ``max_cosets`` cosets appear the partial table is returned
    with ``complete=False``.
    """
    oracle = subgroup.parent
    letters = oracle.alphabet.letters
    reps: list[Word] = [()]
    rep_elems = [oracle.identity]
    rep_invs = [oracle.identity]
    transitions: list[dict[str, int]] = [{}]
    i = 0
    while i < len(reps):
        for x in letters:
            h = oracle.multiply(rep_elems[i], oracle.letter_images[x])
            for j, inv in enumerate(rep_invs):
                if subgroup.contains(oracle.multiply(h, inv)):
                    break
            else:
                if len(reps) >= max_cosets:
                    return CosetTable(reps, transitions, complete=False)
                j = len(reps)
                reps.append(reps[i] + (x,))
                rep_elems.append(h)
                rep_invs.append(oracle.inverse(h))
                transitions.append({})
            transitions[i][x] = j
        i += 1
    return CosetTable(reps, transitions)


def parse_letter_images(group: Monoid, alphabet: InvolutiveAlphabet, text: str) -> dict:
    """Parse ``[t: (1,1); T: (1,-1); s: (-1,0)]``."""
    m = re.fullmatch(r"\s*\[(.*)\]\s*", text, re.S)
    if not m:
        raise GroupError("letters map must look like '[x: <literal>; y: <literal>]'")
    images = {}
    for entry in m.group(1).split(";"):
        if not entry.strip():
            continue
        letter, sep, lit = entry.partition(":")
        letter = letter.strip()
        if not sep or letter not in alphabet.letters:
            raise GroupError(f"bad letters entry {entry.strip()!r}")
        try:
            images[letter] = group.parse(lit)
        except MonoidError as exc:
            raise GroupError(f"letter {letter!r}: {exc}") from None
    return images
