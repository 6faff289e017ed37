"""Compiling expressions into automata.

Both constructions take syntactic derivatives and explore the reachable
residuals breadth-first: guarded expressions become guarded automata
directly, and plain KAT terms become Moore machines via Brzozowski-style
derivatives over (atom, action) letters.
"""
from __future__ import annotations

from collections import deque
from typing import Tuple

from .errors import CapacityError
from .automata import GkatAutomaton, MooreAutomaton
from .language import _collect_actions
from .syntax import (
    Act,
    Exp,
    IfThenElse,
    KAct,
    KOne,
    KPlus,
    KSeq,
    KStar,
    KTest,
    KZero,
    KZERO,
    KONE,
    KatExp,
    One,
    Seq,
    TestSet,
    While,
    atom_satisfies,
    atoms,
    is_bexp,
    kplus,
    kseq,
)

STATE_LIMIT = 100_000

_ONE = One()


def _check_actions(e, actions):
    used = set()
    _collect_actions(e, used)
    missing = used - set(actions)
    if missing:
        raise ValueError("undeclared actions: %s" % ", ".join(sorted(missing)))


def _seq1(e: Exp, f: Exp) -> Exp:
    # sequencing with the unit dropped, so residuals stay small
    if isinstance(e, One):
        return f
    if isinstance(f, One):
        return e
    return Seq(e, f)


def _step(e: Exp, atom):
    """One-step behavior of a residual: 0, 1, or (action, next residual)."""
    if is_bexp(e):
        return atom_satisfies(atom, e)
    if isinstance(e, Act):
        return (e.name, _ONE)
    if isinstance(e, Seq):
        d = _step(e.left, atom)
        if isinstance(d, tuple):
            return (d[0], _seq1(d[1], e.right))
        if d == 1:
            return _step(e.right, atom)
        return 0
    if isinstance(e, IfThenElse):
        if atom_satisfies(atom, e.cond):
            return _step(e.then_branch, atom)
        return _step(e.else_branch, atom)
    if isinstance(e, While):
        if not atom_satisfies(atom, e.cond):
            return 1
        d = _step(e.body, atom)
        if isinstance(d, tuple):
            return (d[0], _seq1(d[1], e))
        return 0
    raise TypeError("not an expression: %r" % (e,))


def gkat_automaton(
    e: Exp,
    tests: TestSet,
    actions: Tuple[str, ...],
    max_states: int = STATE_LIMIT,
) -> GkatAutomaton:
    """The derivative automaton of e; state 0 is e itself."""
    _check_actions(e, actions)
    ats = atoms(tests)
    states = [e]
    index = {e: 0}
    queue = deque([e])
    delta = []
    while queue:
        cur = queue.popleft()
        row = []
        for atom in ats:
            d = _step(cur, atom)
            if isinstance(d, tuple):
                p, residual = d
                if residual not in index:
                    if len(states) >= max_states:
                        raise CapacityError(
                            "more than %d residuals" % max_states
                        )
                    index[residual] = len(states)
                    states.append(residual)
                    queue.append(residual)
                row.append((p, index[residual]))
            else:
                row.append(d)
        delta.append(tuple(row))
    return GkatAutomaton(tests, tuple(actions), tuple(delta), 0)


# ===== KAT derivatives =====


def _kat_eps(k: KatExp, atom) -> int:
    if isinstance(k, KZero):
        return 0
    if isinstance(k, (KOne, KStar)):
        return 1
    if isinstance(k, KTest):
        return atom_satisfies(atom, k.arg)
    if isinstance(k, KAct):
        return 0
    if isinstance(k, KPlus):
        for t in k.terms:
            if _kat_eps(t, atom):
                return 1
        return 0
    if isinstance(k, KSeq):
        for part in k.parts:
            if not _kat_eps(part, atom):
                return 0
        return 1
    raise TypeError("not a KAT term: %r" % (k,))


def _kat_deriv(k: KatExp, atom, action: str) -> KatExp:
    if isinstance(k, (KZero, KOne, KTest)):
        return KZERO
    if isinstance(k, KAct):
        return KONE if k.name == action else KZERO
    if isinstance(k, KPlus):
        return kplus(*[_kat_deriv(t, atom, action) for t in k.terms])
    if isinstance(k, KSeq):
        head, tail = k.parts[0], kseq(*k.parts[1:])
        first = kseq(_kat_deriv(head, atom, action), tail)
        if _kat_eps(head, atom):
            return kplus(first, _kat_deriv(tail, atom, action))
        return first
    if isinstance(k, KStar):
        return kseq(_kat_deriv(k.arg, atom, action), k)
    raise TypeError("not a KAT term: %r" % (k,))


def kat_moore_automaton(
    k: KatExp,
    tests: TestSet,
    actions: Tuple[str, ...],
    max_states: int = STATE_LIMIT,
) -> MooreAutomaton:
    """The derivative Moore machine of a KAT term; state 0 is k itself."""
    ats = atoms(tests)
    actions = tuple(actions)
    states = [k]
    index = {k: 0}
    queue = deque([k])
    delta = []
    outputs = []
    while queue:
        cur = queue.popleft()
        row = []
        out = []
        for atom in ats:
            out.append(_kat_eps(cur, atom))
            for p in actions:
                d = _kat_deriv(cur, atom, p)
                if d not in index:
                    if len(states) >= max_states:
                        raise CapacityError("more than %d derivatives" % max_states)
                    index[d] = len(states)
                    states.append(d)
                    queue.append(d)
                row.append(index[d])
        delta.append(tuple(row))
        outputs.append(tuple(out))
    return MooreAutomaton(tests, actions, tuple(delta), tuple(outputs), 0)


# ===== Hand-built examples =====


def unrolled_while_automaton() -> GkatAutomaton:
    """Three-state automaton for '(while b do p); do q' in which the loop
    state exists twice; the two copies are bisimilar, so minimization
    merges them into a two-state machine."""
    tests = TestSet(("b",))
    b_false, b_true = 0, 1
    row_loop = [None, None]
    row_loop[b_true] = ("p", 1)
    row_loop[b_false] = ("q", 2)
    delta = (
        tuple(row_loop),
        tuple(row_loop),
        (1, 1),
    )
    return GkatAutomaton(tests, ("p", "q"), delta, 0)
