"""Register monoids: exact arithmetic, normal forms, literals and enumeration.

Every monoid is a small immutable object exposing the same protocol
(``identity``, ``multiply``, ``is_identity``, ``try_two_sided_inverse``,
``size``, ``enumerate``, ``parse``, ``format``).  Elements are frozen,
hashable values, so they can be used as dictionary keys when searching over
configurations.

Products are always written left to right: ``multiply(a, b)`` means "do
``a`` then ``b``", matching an automaton register that is multiplied on the
right as edges are read.
"""
from __future__ import annotations

import itertools
import re
import string
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


class MonoidError(ValueError):
    """Raised for invalid elements, descriptor mismatches and bad literals."""


class LiteralSyntaxError(MonoidError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


# ---------------------------------------------------------------------------
# element types


@dataclass(frozen=True)
class FreeGroupElement:
    """Reduced word of ``(generator index, sign)`` pairs, sign in {+1, -1}."""

    word: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        for (i, s), (j, t) in zip(self.word, self.word[1:]):
            if i == j and s == -t:
                raise MonoidError(f"word is not reduced: {self.word}")


@dataclass(frozen=True)
class FreeAbelianElement:
    vector: tuple[int, ...]


@dataclass(frozen=True)
class PolycyclicElement:
    """Partial map on stack words sending ``w + pop`` to ``w + push``."""

    pop: str = ""
    push: str = ""

    def apply(self, stack: str) -> str | None:
        if not stack.endswith(self.pop):
            return None
        return stack[: len(stack) - len(self.pop)] + self.push


@dataclass(frozen=True)
class PolycyclicZero:
    """The empty partial map."""

    def apply(self, stack: str) -> None:
        return None


ZERO = PolycyclicZero()


@dataclass(frozen=True)
class PermutationElement:
    """Bijection of ``range(len(images))``; ``i`` is sent to ``images[i]``."""

    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise MonoidError(f"not a permutation: {self.images}")


@dataclass(frozen=True)
class TrivialElement:
    pass


ONE = TrivialElement()


@dataclass(frozen=True)
class DirectProductElement:
    components: tuple


# ---------------------------------------------------------------------------
# monoids


class Monoid:
    """Base class for register monoids.

    Subclasses set ``kind`` and implement the arithmetic.  ``is_group`` and
    ``claims_unique_left_inverses`` are the descriptor flags.
    """

    kind: str = ""
    is_group: bool = False
    claims_unique_left_inverses: bool = False

    @property
    def identity(self):
        raise NotImplementedError

    def contains(self, a) -> bool:
        raise NotImplementedError

    def _mul(self, a, b):
        raise NotImplementedError

    def multiply(self, a, b):
        for x in (a, b):
            if not self.contains(x):
                raise MonoidError(f"{x!r} is not an element of {self.describe()}")
        return self._mul(a, b)

    def product(self, elements: Iterable):
        result = self.identity
        for e in elements:
            result = self._mul(result, e)
        return result

    def is_identity(self, a) -> bool:
        return a == self.identity

    def is_dead(self, a) -> bool:
        """True if no product ``a * x`` can ever be the identity."""
        return False

    def try_two_sided_inverse(self, a):
        raise NotImplementedError

    def inverse(self, a):
        inv = self.try_two_sided_inverse(a)
        if inv is None:
            raise MonoidError(f"{self.format(a)} is not a unit of {self.describe()}")
        return inv

    def size(self, a) -> int:
        raise NotImplementedError

    def enumerate(self, size_bound: int) -> list:
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def format(self, a) -> str:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.describe()}>"

    def __eq__(self, other):
        return type(self) is type(other) and self.describe() == other.describe()

    def __hash__(self):
        return hash(self.describe())


_LETTER_POOL = string.ascii_lowercase.replace("e", "")  # "e" spells the identity


def _letters(rank: int) -> str:
    if not 0 <= rank <= len(_LETTER_POOL):
        raise MonoidError(f"rank must be between 0 and {len(_LETTER_POOL)}, got {rank}")
    return _LETTER_POOL[:rank]


class FreeGroup(Monoid):
    kind = "free-group"
    is_group = True
    claims_unique_left_inverses = True

    def __init__(self, rank: int):
        self.rank = rank
        self.letters = _letters(rank)

    @property
    def identity(self):
        return FreeGroupElement()

    def contains(self, a):
        return isinstance(a, FreeGroupElement) and all(
            0 <= i < self.rank and s in (1, -1) for i, s in a.word
        )

    def _mul(self, a, b):
        return FreeGroupElement(reduce_word(a.word + b.word))

    def generator(self, i: int, sign: int = 1) -> FreeGroupElement:
        return FreeGroupElement(((i, sign),))

    def try_two_sided_inverse(self, a):
        return FreeGroupElement(tuple((i, -s) for i, s in reversed(a.word)))

    def size(self, a):
        return len(a.word)

    def enumerate(self, size_bound):
        out = [self.identity]
        frontier = [()]
        for _ in range(size_bound):
            nxt = []
            for w in frontier:
                for i in range(self.rank):
                    for s in (1, -1):
                        if w and w[-1] == (i, -s):
                            continue
                        nxt.append(w + ((i, s),))
            out.extend(FreeGroupElement(w) for w in nxt)
            frontier = nxt
        return out

    def parse(self, text):
        stripped = text.strip()
        if stripped == "e":
            return self.identity
        word = []
        for pos, ch in enumerate(text):
            if ch.isspace():
                continue
            low = ch.lower()
            if not ch.isalpha() or low not in self.letters:
                raise LiteralSyntaxError(f"unexpected {ch!r} for free group of rank {self.rank}", text, pos)
            word.append((self.letters.index(low), 1 if ch.islower() else -1))
        if not word:
            raise LiteralSyntaxError("empty free-group literal (use 'e')", text, 0)
        return FreeGroupElement(reduce_word(word))

    def format(self, a):
        if not a.word:
            return "e"
        return "".join(self.letters[i] if s > 0 else self.letters[i].upper() for i, s in a.word)

    def describe(self):
        return f"free-group({self.rank})"


def reduce_word(word: Sequence[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    """Free reduction with a stack; the result does not depend on cancellation order."""
    out: list[tuple[int, int]] = []
    for i, s in word:
        if out and out[-1] == (i, -s):
            out.pop()
        else:
            out.append((i, s))
    return tuple(out)


class FreeAbelian(Monoid):
    kind = "free-abelian"
    is_group = True
    claims_unique_left_inverses = True

    def __init__(self, rank: int):
        if rank < 0:
            raise MonoidError("rank must be non-negative")
        self.rank = rank

    @property
    def identity(self):
        return FreeAbelianElement((0,) * self.rank)

    def contains(self, a):
        return isinstance(a, FreeAbelianElement) and len(a.vector) == self.rank

    def _mul(self, a, b):
        return FreeAbelianElement(tuple(x + y for x, y in zip(a.vector, b.vector)))

    def try_two_sided_inverse(self, a):
        return FreeAbelianElement(tuple(-x for x in a.vector))

    def size(self, a):
        return sum(abs(x) for x in a.vector)

    def enumerate(self, size_bound):
        r = range(-size_bound, size_bound + 1)
        vecs = [v for v in itertools.product(r, repeat=self.rank) if sum(map(abs, v)) <= size_bound]
        vecs.sort(key=lambda v: (sum(map(abs, v)), v))
        return [FreeAbelianElement(v) for v in vecs]

    def parse(self, text):
        m = re.fullmatch(r"\s*\[(.*)\]\s*", text)
        if not m:
            raise LiteralSyntaxError("expected '[i1,...,in]'", text, 0)
        body = m.group(1).strip()
        parts = [p.strip() for p in body.split(",")] if body else []
        if len(parts) != self.rank:
            raise LiteralSyntaxError(f"expected {self.rank} entries, got {len(parts)}", text, m.start(1))
        vec = []
        for p in parts:
            if not re.fullmatch(r"[+-]?\d+", p):
                raise LiteralSyntaxError(f"bad integer {p!r}", text, text.find(p))
            vec.append(int(p))
        return FreeAbelianElement(tuple(vec))

    def format(self, a):
        return "[" + ",".join(str(x) for x in a.vector) + "]"

    def describe(self):
        return f"free-abelian({self.rank})"


class Polycyclic(Monoid):
    """Polycyclic monoid of the given rank, including its zero."""

    kind = "polycyclic"
    claims_unique_left_inverses = True

    def __init__(self, rank: int):
        if rank < 1:
            raise MonoidError("polycyclic rank must be at least 1")
        self.rank = rank
        self.letters = _letters(rank)

    @property
    def identity(self):
        return PolycyclicElement("", "")

    zero = ZERO

    def push(self, x: str) -> PolycyclicElement:
        return PolycyclicElement("", x)

    def pop(self, x: str) -> PolycyclicElement:
        return PolycyclicElement(x, "")

    def contains(self, a):
        if a is ZERO or isinstance(a, PolycyclicZero):
            return True
        return isinstance(a, PolycyclicElement) and all(c in self.letters for c in a.pop + a.push)

    def _mul(self, a, b):
        if isinstance(a, PolycyclicZero) or isinstance(b, PolycyclicZero):
            return ZERO
        u, v = a.pop, a.push
        s, t = b.pop, b.push
        if v.endswith(s):
            return PolycyclicElement(u, v[: len(v) - len(s)] + t)
        if s.endswith(v):
            return PolycyclicElement(s[: len(s) - len(v)] + u, t)
        return ZERO

    def is_dead(self, a):
        return isinstance(a, PolycyclicZero)

    def try_two_sided_inverse(self, a):
        if isinstance(a, PolycyclicZero):
            return None
        candidate = PolycyclicElement(a.push, a.pop)
        if self.is_identity(self._mul(a, candidate)) and self.is_identity(self._mul(candidate, a)):
            return candidate
        return None

    def size(self, a):
        if isinstance(a, PolycyclicZero):
            return 0
        return len(a.pop) + len(a.push)

    def words(self, max_len: int) -> list[str]:
        return ["".join(p) for n in range(max_len + 1) for p in itertools.product(self.letters, repeat=n)]

    def enumerate(self, size_bound):
        out: list = [ZERO]
        ws = self.words(size_bound)
        for total in range(size_bound + 1):
            for u in ws:
                if len(u) <= total:
                    out.extend(PolycyclicElement(u, v) for v in ws if len(v) == total - len(u))
        return out

    def parse(self, text):
        stripped = text.strip()
        if stripped == "0":
            return ZERO
        m = re.fullmatch(r"\(\s*([a-z]+|e)\s*\|\s*([a-z]+|e)\s*\)", stripped)
        if not m:
            raise LiteralSyntaxError("expected '(<word>|<word>)' or '0'", text, 0)
        pop, push = ("" if g == "e" else g for g in m.groups())
        for c in pop + push:
            if c not in self.letters:
                raise LiteralSyntaxError(f"stack letter {c!r} outside rank {self.rank}", text, text.find(c))
        return PolycyclicElement(pop, push)

    def format(self, a):
        if isinstance(a, PolycyclicZero):
            return "0"
        return f"({a.pop or 'e'}|{a.push or 'e'})"

    def describe(self):
        return f"polycyclic({self.rank})"


class SymmetricGroup(Monoid):
    """Permutations of ``range(degree)``; ``a*b`` applies ``a`` first."""

    kind = "permutation-group"
    is_group = True
    claims_unique_left_inverses = True

    def __init__(self, degree: int):
        if degree < 1:
            raise MonoidError("degree must be positive")
        self.degree = degree

    @property
    def identity(self):
        return PermutationElement(tuple(range(self.degree)))

    def contains(self, a):
        return isinstance(a, PermutationElement) and len(a.images) == self.degree

    def _mul(self, a, b):
        return PermutationElement(tuple(b.images[i] for i in a.images))

    def try_two_sided_inverse(self, a):
        inv = [0] * self.degree
        for i, j in enumerate(a.images):
            inv[j] = i
        return PermutationElement(tuple(inv))

    def size(self, a):
        return 0

    def enumerate(self, size_bound):
        return [PermutationElement(p) for p in itertools.permutations(range(self.degree))]

    def from_cycles(self, cycles: Iterable[Sequence[int]]) -> PermutationElement:
        images = list(range(self.degree))
        seen: set[int] = set()
        for cyc in cycles:
            for x in cyc:
                if not 0 <= x < self.degree or x in seen:
                    raise MonoidError(f"bad cycle {tuple(cyc)} for degree {self.degree}")
                seen.add(x)
            for x, y in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                images[x] = y
        return PermutationElement(tuple(images))

    def parse(self, text):
        stripped = text.strip()
        if stripped == "id":
            return self.identity
        cycles = []
        pos = 0
        for m in re.finditer(r"\s*\(([\d\s]*)\)\s*", text):
            if m.start() != pos:
                raise LiteralSyntaxError("expected cycle '(i j ...)'", text, pos)
            pos = m.end()
            cycles.append([int(t) for t in m.group(1).split()])
        if pos != len(text) or not cycles:
            raise LiteralSyntaxError("expected cycle notation or 'id'", text, pos)
        try:
            return self.from_cycles(cycles)
        except MonoidError as exc:
            raise LiteralSyntaxError(str(exc), text, 0) from None

    def format(self, a):
        seen = set()
        parts = []
        for start in range(self.degree):
            if start in seen or a.images[start] == start:
                continue
            cyc = [start]
            seen.add(start)
            x = a.images[start]
            while x != start:
                cyc.append(x)
                seen.add(x)
                x = a.images[x]
            parts.append("(" + " ".join(map(str, cyc)) + ")")
        return "".join(parts) or "id"

    def describe(self):
        return f"sym({self.degree})"


class TrivialMonoid(Monoid):
    kind = "trivial"
    is_group = True
    claims_unique_left_inverses = True

    @property
    def identity(self):
        return ONE

    def contains(self, a):
        return isinstance(a, TrivialElement)

    def _mul(self, a, b):
        return ONE

    def try_two_sided_inverse(self, a):
        return ONE

    def size(self, a):
        return 0

    def enumerate(self, size_bound):
        return [ONE]

    def parse(self, text):
        if text.strip() not in ("1", "e"):
            raise LiteralSyntaxError("trivial monoid literal is '1'", text, 0)
        return ONE

    def format(self, a):
        return "1"

    def describe(self):
        return "trivial"


class DirectProduct(Monoid):
    kind = "direct-product"

    def __init__(self, factors: Sequence[Monoid]):
        if len(factors) < 2:
            raise MonoidError("a direct product needs at least two factors")
        if any(isinstance(f, DirectProduct) for f in factors):
            raise MonoidError("nested direct products are not supported; flatten them")
        self.factors = tuple(factors)
        self.is_group = all(f.is_group for f in factors)
        self.claims_unique_left_inverses = all(f.claims_unique_left_inverses for f in factors)

    @property
    def identity(self):
        return DirectProductElement(tuple(f.identity for f in self.factors))

    def contains(self, a):
        return (
            isinstance(a, DirectProductElement)
            and len(a.components) == len(self.factors)
            and all(f.contains(c) for f, c in zip(self.factors, a.components))
        )

    def _mul(self, a, b):
        return DirectProductElement(
            tuple(f._mul(x, y) for f, x, y in zip(self.factors, a.components, b.components))
        )

    def is_dead(self, a):
        return any(f.is_dead(c) for f, c in zip(self.factors, a.components))

    def try_two_sided_inverse(self, a):
        inv = [f.try_two_sided_inverse(c) for f, c in zip(self.factors, a.components)]
        if any(x is None for x in inv):
            return None
        return DirectProductElement(tuple(inv))

    def size(self, a):
        return sum(f.size(c) for f, c in zip(self.factors, a.components))

    def enumerate(self, size_bound):
        per_factor = [f.enumerate(size_bound) for f in self.factors]
        out = []
        for combo in itertools.product(*per_factor):
            if sum(f.size(c) for f, c in zip(self.factors, combo)) <= size_bound:
                out.append(DirectProductElement(tuple(combo)))
        return out

    def parse(self, text):
        parts = text.split("*")
        if len(parts) != len(self.factors):
            raise LiteralSyntaxError(f"expected {len(self.factors)} '*'-separated components", text, 0)
        return DirectProductElement(tuple(f.parse(p) for f, p in zip(self.factors, parts)))

    def format(self, a):
        return " * ".join(f.format(c) for f, c in zip(self.factors, a.components))

    def describe(self):
        return "product(" + ", ".join(f.describe() for f in self.factors) + ")"


# ---------------------------------------------------------------------------
# descriptors

_DESCRIPTOR_RE = re.compile(r"\s*([a-z-]+)\s*(?:\((.*)\))?\s*$", re.S)

# extra kinds (e.g. the infinite dihedral group) register themselves here
EXTRA_KINDS: dict[str, type] = {}


def _split_top_level(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def parse_descriptor(text: str) -> Monoid:
    """Parse ``free-group(2)``, ``polycyclic(2)``, ``product(sym(3), trivial)`` etc."""
    m = _DESCRIPTOR_RE.match(text)
    if not m:
        raise MonoidError(f"cannot parse monoid descriptor {text!r}")
    kind, arg = m.group(1), m.group(2)

    def int_arg() -> int:
        if arg is None or not arg.strip().isdigit():
            raise MonoidError(f"{kind} needs an integer parameter, got {arg!r}")
        return int(arg)

    if kind == "free-group":
        return FreeGroup(int_arg())
    if kind == "free-abelian":
        return FreeAbelian(int_arg())
    if kind == "polycyclic":
        return Polycyclic(int_arg())
    if kind in ("sym", "permutation-group"):
        return SymmetricGroup(int_arg())
    if kind == "trivial" and arg is None:
        return TrivialMonoid()
    if kind in ("product", "direct-product"):
        if not arg:
            raise MonoidError("product needs factor descriptors")
        return DirectProduct([parse_descriptor(p) for p in _split_top_level(arg)])
    if kind in EXTRA_KINDS and arg is None:
        return EXTRA_KINDS[kind]()
    raise MonoidError(f"unknown monoid kind {kind!r}")


# ---------------------------------------------------------------------------
# module-level operations


def multiply(monoid: Monoid, a, b):
    return monoid.multiply(a, b)


def is_identity(monoid: Monoid, a) -> bool:
    return monoid.is_identity(a)


def try_two_sided_inverse(monoid: Monoid, a):
    return monoid.try_two_sided_inverse(a)


def enumerate_elements(monoid: Monoid, size_bound: int) -> list:
    if size_bound < 0:
        raise MonoidError("size_bound must be non-negative")
    return monoid.enumerate(size_bound)


def parse_element(monoid: Monoid, text: str):
    return monoid.parse(text)


def format_element(monoid: Monoid, a) -> str:
    return monoid.format(a)


@dataclass
class ULIReport:
    monoid: str
    size_bound: int
    elements_checked: int = 0
    violations: list[tuple] = field(default_factory=list)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and not self.violations


def verify_unique_left_inverses(monoid: Monoid, size_bound: int, max_elements: int = 5000) -> ULIReport:
    """Search all ``a, b, c`` of size <= bound for ``ba = 1 = ca`` with ``b != c``."""
    report = ULIReport(monoid.describe(), size_bound)
    try:
        elements = monoid.enumerate(size_bound)
    except NotImplementedError:
        report.error = f"{monoid.describe()} cannot be enumerated"
        return report
    if len(elements) > max_elements:
        report.error = f"{len(elements)} elements exceed the ceiling of {max_elements}"
        return report
    report.elements_checked = len(elements)
    for a in elements:
        left_inverses = [b for b in elements if monoid.is_identity(monoid._mul(b, a))]
        for b, c in itertools.combinations(left_inverses, 2):
            report.violations.append((a, b, c))
    return report


def units(monoid: Monoid, size_bound: int) -> Iterator:
    """Elements of size <= bound that have a two-sided inverse."""
    for a in monoid.enumerate(size_bound):
        if monoid.try_two_sided_inverse(a) is not None:
            yield a
