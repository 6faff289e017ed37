"""Shared generators and independent oracles for the test suite."""
import random
from typing import List, Optional, Tuple

from gkat import (
    Act,
    And,
    GkatAutomaton,
    GuardedString,
    IfThenElse,
    Not,
    One,
    Or,
    Seq,
    Test,
    TestSet,
    While,
    Zero,
    accepts_gkat,
    atoms,
    normalize,
)


def rand_bexp(rng: random.Random, tests: TestSet, depth: int):
    if depth <= 0 or rng.random() < 0.3:
        choices = [Zero(), One()] + [Test(t) for t in tests]
        return rng.choice(choices)
    kind = rng.randrange(3)
    if kind == 0:
        return Not(rand_bexp(rng, tests, depth - 1))
    if kind == 1:
        return And(rand_bexp(rng, tests, depth - 1), rand_bexp(rng, tests, depth - 1))
    return Or(rand_bexp(rng, tests, depth - 1), rand_bexp(rng, tests, depth - 1))


def rand_exp(rng: random.Random, tests: TestSet, actions: Tuple[str, ...], depth: int):
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.6:
            return Act(rng.choice(actions))
        return rand_bexp(rng, tests, 1)
    kind = rng.randrange(3)
    if kind == 0:
        return Seq(
            rand_exp(rng, tests, actions, depth - 1),
            rand_exp(rng, tests, actions, depth - 1),
        )
    if kind == 1:
        return IfThenElse(
            rand_bexp(rng, tests, 2),
            rand_exp(rng, tests, actions, depth - 1),
            rand_exp(rng, tests, actions, depth - 1),
        )
    return While(rand_bexp(rng, tests, 2), rand_exp(rng, tests, actions, depth - 1))


def rand_automaton(
    rng: random.Random,
    tests: TestSet,
    actions: Tuple[str, ...],
    max_states: int,
) -> GkatAutomaton:
    """Random automaton, not necessarily normal."""
    n = rng.randint(1, max_states)
    n_atoms = 2 ** len(tests)
    delta = []
    for _ in range(n):
        row = []
        for _ in range(n_atoms):
            roll = rng.random()
            if roll < 0.25:
                row.append(1)
            elif roll < 0.5:
                row.append(0)
            else:
                row.append((rng.choice(actions), rng.randrange(n)))
        delta.append(tuple(row))
    return GkatAutomaton(tests, actions, tuple(delta), 0)


def rand_normal_automaton(rng, tests, actions, max_states) -> GkatAutomaton:
    return normalize(rand_automaton(rng, tests, actions, max_states))


def rand_live_normal_automaton(rng, tests, actions, max_states) -> GkatAutomaton:
    """Normal automaton whose initial state accepts at least one word."""
    while True:
        aut = rand_normal_automaton(rng, tests, actions, max_states)
        if any(aut.delta[aut.initial][a] != 0 for a in range(2 ** len(tests))):
            return aut


def enumerate_guarded_strings(
    tests: TestSet, actions: Tuple[str, ...], max_actions: int
) -> List[GuardedString]:
    """All guarded strings with up to max_actions actions, canonical order."""
    ats = atoms(tests)
    level = [GuardedString((a,), ()) for a in ats]
    out = list(level)
    for _ in range(max_actions):
        nxt = []
        for w in level:
            for p in actions:
                for a in ats:
                    nxt.append(GuardedString(w.atoms + (a,), w.actions + (p,)))
        out.extend(nxt)
        level = nxt
    return out


def bounded_inclusion_violation(
    a: GkatAutomaton, x: int, b: GkatAutomaton, y: int, max_actions: int
) -> Optional[GuardedString]:
    """Search for a word of at most max_actions actions accepted from x but
    not from y, by a breadth-first product walk where the right side may
    fall off the automaton. Any witness found is replayed through
    accepts_gkat on both sides before being returned."""
    ats = atoms(a.tests)
    start = (x, y)
    frontier = {start: ()}
    seen = {start}
    for _ in range(max_actions + 1):
        nxt = {}
        for (u, v), path in frontier.items():
            for bits in range(len(ats)):
                e1 = a.delta[u][bits]
                e2 = None if v is None else b.delta[v][bits]
                if e1 == 1 and e2 != 1:
                    w = GuardedString(
                        tuple(at for at, _ in path) + (ats[bits],),
                        tuple(p for _, p in path),
                    )
                    assert accepts_gkat(a, x, w) == 1
                    assert accepts_gkat(b, y, w) == 0
                    return w
                if isinstance(e1, tuple):
                    p, u2 = e1
                    if isinstance(e2, tuple) and e2[0] == p:
                        v2 = e2[1]
                    else:
                        v2 = None
                    key = (u2, v2)
                    if key not in seen:
                        seen.add(key)
                        nxt[key] = path + ((ats[bits], p),)
        frontier = nxt
    return None
