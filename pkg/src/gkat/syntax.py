"""Core syntax for guarded programs.

Boolean guards, program expressions, atoms (truth assignments over the
declared tests), guarded strings and prefixes with fusion, the imperative
concrete syntax parser, pretty printers, and the embedding into plain
Kleene algebra with tests terms.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .errors import CapacityError, ParseError

MACRON = "̄"  # combining overline, used to print negated tests

ATOM_LIMIT = 2 ** 20

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

KEYWORDS = frozenset(
    ["do", "assert", "if", "then", "else", "while", "not", "and", "or"]
)


def _check_names(names, what):
    seen = set()
    for name in names:
        if not _IDENT_RE.match(name) or name in KEYWORDS or name in ("0", "1"):
            raise ValueError("invalid %s name: %r" % (what, name))
        if name in seen:
            raise ValueError("duplicate %s name: %r" % (what, name))
        seen.add(name)


@dataclass(frozen=True)
class TestSet:
    """Ordered set of primitive test names; the order is canonical."""

    tests: Tuple[str, ...]

    def __post_init__(self):
        _check_names(self.tests, "test")

    def __len__(self):
        return len(self.tests)

    def __iter__(self):
        return iter(self.tests)

    def index(self, name: str) -> int:
        return self.tests.index(name)


# ===== Boolean guards and program expressions =====


class Exp:
    """Base class for program expressions."""

    def __str__(self):
        return exp_to_str(self)


class BExp(Exp):
    """Base class for boolean guards; guards are also expressions."""

    def __str__(self):
        return bexp_to_str(self)


@dataclass(frozen=True)
class Zero(BExp):
    pass


@dataclass(frozen=True)
class One(BExp):
    pass


@dataclass(frozen=True)
class Test(BExp):
    name: str


@dataclass(frozen=True)
class Not(BExp):
    arg: "BExp"


@dataclass(frozen=True)
class And(BExp):
    left: "BExp"
    right: "BExp"


@dataclass(frozen=True)
class Or(BExp):
    left: "BExp"
    right: "BExp"


@dataclass(frozen=True)
class Act(Exp):
    name: str


@dataclass(frozen=True)
class Seq(Exp):
    left: "Exp"
    right: "Exp"


@dataclass(frozen=True)
class IfThenElse(Exp):
    cond: "BExp"
    then_branch: "Exp"
    else_branch: "Exp"


@dataclass(frozen=True)
class While(Exp):
    cond: "BExp"
    body: "Exp"


def is_bexp(e: Exp) -> bool:
    return isinstance(e, BExp)


# ===== Atoms =====


@dataclass(frozen=True, order=True)
class Atom:
    """One truth assignment over an ordered test tuple.

    Bit i of `bits` (counted from the most significant, i.e. tests[0])
    records whether tests[i] holds.
    """

    tests: Tuple[str, ...]
    bits: int

    def value(self, name: str) -> bool:
        if name not in self.tests:
            raise ValueError("unknown test: %r" % (name,))
        i = self.tests.index(name)
        return bool(self.bits >> (len(self.tests) - 1 - i) & 1)

    def __str__(self):
        if not self.tests:
            return "⊤"
        out = []
        for i, name in enumerate(self.tests):
            if self.bits >> (len(self.tests) - 1 - i) & 1:
                out.append(name)
            else:
                out.append(name + MACRON)
        return "".join(out)


def atoms(tests: TestSet, limit: int = ATOM_LIMIT) -> List[Atom]:
    """All atoms over the test set, in canonical order.

    Canonical order is lexicographic by test order with the negative
    assignment before the positive one, so for tests (b,) the order is
    [b̄, b].
    """
    n = len(tests.tests)
    count = 2 ** n
    if count > limit:
        raise CapacityError("2^%d atoms exceed the limit of %d" % (n, limit))
    return [Atom(tests.tests, bits) for bits in range(count)]


def atom_satisfies(atom: Atom, b: BExp) -> int:
    """Evaluate a guard under an atom; returns 0 or 1."""
    if isinstance(b, Zero):
        return 0
    if isinstance(b, One):
        return 1
    if isinstance(b, Test):
        return int(atom.value(b.name))
    if isinstance(b, Not):
        return 1 - atom_satisfies(atom, b.arg)
    if isinstance(b, And):
        return atom_satisfies(atom, b.left) & atom_satisfies(atom, b.right)
    if isinstance(b, Or):
        return atom_satisfies(atom, b.left) | atom_satisfies(atom, b.right)
    raise TypeError("not a guard: %r" % (b,))


# ===== Guarded strings =====


@dataclass(frozen=True)
class GuardedString:
    """Alternating word a0 p1 a1 ... pn an with one more atom than actions."""

    atoms: Tuple[Atom, ...]
    actions: Tuple[str, ...]

    def __post_init__(self):
        if len(self.atoms) != len(self.actions) + 1:
            raise ValueError("need exactly one more atom than actions")

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @property
    def first_atom(self) -> Atom:
        return self.atoms[0]

    @property
    def last_atom(self) -> Atom:
        return self.atoms[-1]

    def __str__(self):
        out = [str(self.atoms[0])]
        for p, a in zip(self.actions, self.atoms[1:]):
            out.append(p)
            out.append(str(a))
        return "".join(out)


@dataclass(frozen=True)
class GuardedPrefix:
    """Dangling word (a0, p1)(a1, p2)... awaiting a guarded string tail."""

    pairs: Tuple[Tuple[Atom, str], ...]

    @property
    def n_actions(self) -> int:
        return len(self.pairs)

    def extend(self, atom: Atom, action: str) -> "GuardedPrefix":
        return GuardedPrefix(self.pairs + ((atom, action),))

    def join(self, tail: GuardedString) -> GuardedString:
        """Concatenate; the tail's head atom fills the dangling slot."""
        return GuardedString(
            tuple(a for a, _ in self.pairs) + tail.atoms,
            tuple(p for _, p in self.pairs) + tail.actions,
        )

    def __str__(self):
        if not self.pairs:
            return "ε"
        return "".join(str(a) + p for a, p in self.pairs)


EMPTY_PREFIX = GuardedPrefix(())


def fuse(v: GuardedString, w: GuardedString) -> Optional[GuardedString]:
    """Fusion product; None when the join atoms disagree."""
    if v.last_atom != w.first_atom:
        return None
    return GuardedString(v.atoms + w.atoms[1:], v.actions + w.actions)


def suffixes_gs(z: GuardedString) -> List[GuardedString]:
    """All guarded-string suffixes of z, longest first.

    The shortest is the single-atom string holding z's last atom; there
    are exactly len(z.atoms) of them.
    """
    return [
        GuardedString(z.atoms[i:], z.actions[i:]) for i in range(z.n_actions + 1)
    ]


def suffixes_word(w: tuple) -> List[tuple]:
    """All suffixes of a plain tuple word, longest first, ending with ()."""
    return [w[i:] for i in range(len(w) + 1)]


# ===== Kleene algebra with tests terms =====


class KatExp:
    def __str__(self):
        return kat_to_str(self)


@dataclass(frozen=True)
class KZero(KatExp):
    pass


@dataclass(frozen=True)
class KOne(KatExp):
    pass


@dataclass(frozen=True)
class KTest(KatExp):
    arg: BExp


@dataclass(frozen=True)
class KAct(KatExp):
    name: str


@dataclass(frozen=True)
class KPlus(KatExp):
    terms: Tuple[KatExp, ...]


@dataclass(frozen=True)
class KSeq(KatExp):
    parts: Tuple[KatExp, ...]


@dataclass(frozen=True)
class KStar(KatExp):
    arg: KatExp


KZERO = KZero()
KONE = KOne()


def kseq(*parts: KatExp) -> KatExp:
    """Sequential product, flattened, with 0 annihilating and 1 dropped."""
    flat = []
    for k in parts:
        if isinstance(k, KZero):
            return KZERO
        if isinstance(k, KOne):
            continue
        if isinstance(k, KSeq):
            flat.extend(k.parts)
        else:
            flat.append(k)
    if not flat:
        return KONE
    if len(flat) == 1:
        return flat[0]
    return KSeq(tuple(flat))


def kplus(*terms: KatExp) -> KatExp:
    """Sum normalized up to associativity, commutativity and idempotence.

    Terms are deduplicated and sorted by their printed form so equal sums
    are structurally equal; 0 is the unit.
    """
    flat = []
    for k in terms:
        if isinstance(k, KZero):
            continue
        if isinstance(k, KPlus):
            flat.extend(k.terms)
        else:
            flat.append(k)
    keyed = {}
    for k in flat:
        keyed.setdefault(kat_to_str(k), k)
    ordered = [keyed[key] for key in sorted(keyed)]
    if not ordered:
        return KZERO
    if len(ordered) == 1:
        return ordered[0]
    return KPlus(tuple(ordered))


def kstar(k: KatExp) -> KatExp:
    return KStar(k)


def _guard_pos(b: BExp) -> KatExp:
    if isinstance(b, Zero):
        return KZERO
    if isinstance(b, One):
        return KONE
    return KTest(b)


def _guard_neg(b: BExp) -> KatExp:
    if isinstance(b, Zero):
        return KONE
    if isinstance(b, One):
        return KZERO
    return KTest(Not(b))


def embed_kat(e: Exp) -> KatExp:
    """Translate guarded syntax into a plain KAT term.

    Branching becomes a guarded sum b·e + b̄·f and looping becomes
    (b·e)*·b̄.
    """
    if is_bexp(e):
        return _guard_pos(e)
    if isinstance(e, Act):
        return KAct(e.name)
    if isinstance(e, Seq):
        return kseq(embed_kat(e.left), embed_kat(e.right))
    if isinstance(e, IfThenElse):
        return kplus(
            kseq(_guard_pos(e.cond), embed_kat(e.then_branch)),
            kseq(_guard_neg(e.cond), embed_kat(e.else_branch)),
        )
    if isinstance(e, While):
        return kseq(
            kstar(kseq(_guard_pos(e.cond), embed_kat(e.body))),
            _guard_neg(e.cond),
        )
    raise TypeError("not an expression: %r" % (e,))


# ===== Pretty printers =====


def bexp_to_str(b: BExp) -> str:
    return _bexp_str(b, 0)


def _bexp_str(b, level):
    # levels: 0 = or, 1 = and, 2 = not, 3 = primitive
    if isinstance(b, Zero):
        return "0"
    if isinstance(b, One):
        return "1"
    if isinstance(b, Test):
        return b.name
    if isinstance(b, Not):
        s = "not " + _bexp_str(b.arg, 2)
        return "(" + s + ")" if level > 2 else s
    if isinstance(b, And):
        s = _bexp_str(b.left, 1) + " and " + _bexp_str(b.right, 2)
        return "(" + s + ")" if level > 1 else s
    if isinstance(b, Or):
        s = _bexp_str(b.left, 0) + " or " + _bexp_str(b.right, 1)
        return "(" + s + ")" if level > 0 else s
    raise TypeError("not a guard: %r" % (b,))


def exp_to_str(e: Exp) -> str:
    """Print in the imperative concrete syntax; parses back to the same tree."""
    if is_bexp(e):
        return "assert " + bexp_to_str(e)
    if isinstance(e, Act):
        return "do " + e.name
    if isinstance(e, Seq):
        left = exp_to_str(e.left)
        if isinstance(e.left, (Seq, IfThenElse, While)):
            left = "(" + left + ")"
        return left + "; " + exp_to_str(e.right)
    if isinstance(e, IfThenElse):
        return "if %s then %s else %s" % (
            bexp_to_str(e.cond),
            exp_to_str(e.then_branch),
            exp_to_str(e.else_branch),
        )
    if isinstance(e, While):
        return "while %s do %s" % (bexp_to_str(e.cond), exp_to_str(e.body))
    raise TypeError("not an expression: %r" % (e,))


def kat_to_str(k: KatExp) -> str:
    return _kat_str(k, 0)


def _kat_str(k, level):
    # levels: 0 = sum, 1 = product, 2 = star operand
    if isinstance(k, KZero):
        return "0"
    if isinstance(k, KOne):
        return "1"
    if isinstance(k, KTest):
        return "[" + bexp_to_str(k.arg) + "]"
    if isinstance(k, KAct):
        return k.name
    if isinstance(k, KStar):
        return _kat_str(k.arg, 2) + "*"
    if isinstance(k, KSeq):
        s = "·".join(_kat_str(p, 1) for p in k.parts)
        return "(" + s + ")" if level > 0 else s
    if isinstance(k, KPlus):
        s = " + ".join(_kat_str(t, 1) for t in k.terms)
        return "(" + s + ")" if level > 0 else s
    raise TypeError("not a KAT term: %r" % (k,))


# ===== Parser =====

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<zero>0)"
    r"|(?P<one>1)"
    r"|(?P<sym>[;()])"
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError("unexpected character %r" % text[pos], pos)
        if m.lastgroup != "ws":
            kind = m.lastgroup
            value = m.group()
            if kind == "ident" and value in KEYWORDS:
                kind = "kw"
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, tests, actions):
        self.tokens = tokens
        self.i = 0
        self.tests = frozenset(tests)
        self.actions = frozenset(actions)

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind, value=None):
        tok = self.peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            raise ParseError("expected %r, found %r" % (want, tok[1] or "end"), tok[2])
        return self.advance()

    def at_kw(self, word):
        tok = self.peek()
        return tok[0] == "kw" and tok[1] == word

    # expressions

    def parse_seq(self):
        left = self.parse_unit()
        if self.peek()[:2] == ("sym", ";"):
            self.advance()
            return Seq(left, self.parse_seq())
        return left

    def parse_unit(self):
        kind, value, pos = self.peek()
        if kind == "kw" and value == "do":
            self.advance()
            tok = self.expect("ident")
            if tok[1] not in self.actions:
                raise ParseError("unknown action %r" % tok[1], tok[2])
            return Act(tok[1])
        if kind == "kw" and value == "assert":
            self.advance()
            return self.parse_or()
        if kind == "kw" and value == "if":
            self.advance()
            cond = self.parse_or()
            self.expect("kw", "then")
            then_branch = self.parse_seq()
            self.expect("kw", "else")
            return IfThenElse(cond, then_branch, self.parse_seq())
        if kind == "kw" and value == "while":
            self.advance()
            cond = self.parse_or()
            self.expect("kw", "do")
            return While(cond, self.parse_seq())
        if kind == "sym" and value == "(":
            self.advance()
            inner = self.parse_seq()
            self.expect("sym", ")")
            return inner
        raise ParseError("expected a statement, found %r" % (value or "end"), pos)

    # guards

    def parse_or(self):
        left = self.parse_and()
        while self.at_kw("or"):
            self.advance()
            left = Or(left, self.parse_and())
        return left

    def parse_and(self):
        left = self.parse_not()
        while self.at_kw("and"):
            self.advance()
            left = And(left, self.parse_not())
        return left

    def parse_not(self):
        if self.at_kw("not"):
            self.advance()
            return Not(self.parse_not())
        return self.parse_batom()

    def parse_batom(self):
        kind, value, pos = self.peek()
        if kind == "zero":
            self.advance()
            return Zero()
        if kind == "one":
            self.advance()
            return One()
        if kind == "ident":
            if value not in self.tests:
                raise ParseError("unknown test %r" % value, pos)
            self.advance()
            return Test(value)
        if kind == "sym" and value == "(":
            self.advance()
            inner = self.parse_or()
            self.expect("sym", ")")
            return inner
        raise ParseError("expected a guard, found %r" % (value or "end"), pos)


def parse_exp(text: str, tests: TestSet, actions: Tuple[str, ...]) -> Exp:
    """Parse imperative concrete syntax against declared tests and actions."""
    _check_names(actions, "action")
    parser = _Parser(_tokenize(text), tests.tests, actions)
    e = parser.parse_seq()
    parser.expect("eof")
    return e


def parse_bexp(text: str, tests: TestSet) -> BExp:
    """Parse a bare guard."""
    parser = _Parser(_tokenize(text), tests.tests, ())
    b = parser.parse_or()
    parser.expect("eof")
    return b
