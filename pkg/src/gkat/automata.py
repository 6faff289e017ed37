"""Guarded automata and Moore machines over guarded alphabets.

A guarded automaton maps each state and atom to one of: accept (1),
reject (0), or a step (action, next state). A Moore machine reads
(atom, action) letters and outputs, per state, one bit per atom.
Both carry their test and action declarations so words can be checked
against them.

Includes acceptance runs, reachability with shortest witnesses,
normalization, bisimilarity and similarity checks, minimization for both
machine kinds, isomorphism checks, the embedding of guarded automata
into Moore machines, uniform continuations, and DOT emitters.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple, Union

from .errors import NotNormalError
from .syntax import (
    Atom,
    EMPTY_PREFIX,
    GuardedPrefix,
    GuardedString,
    TestSet,
    atoms,
)

Trans = Union[int, Tuple[str, int]]


def _check_entry(entry, actions, n_states):
    if entry == 0 or entry == 1:
        return
    if (
        isinstance(entry, tuple)
        and len(entry) == 2
        and entry[0] in actions
        and isinstance(entry[1], int)
        and 0 <= entry[1] < n_states
    ):
        return
    raise ValueError("bad transition entry: %r" % (entry,))


@dataclass(frozen=True)
class GkatAutomaton:
    """delta[state][atom.bits] is 0, 1, or (action, next_state)."""

    tests: TestSet
    actions: Tuple[str, ...]
    delta: Tuple[Tuple[Trans, ...], ...]
    initial: int

    def __post_init__(self):
        n = len(self.delta)
        if n == 0:
            raise ValueError("need at least one state")
        if not 0 <= self.initial < n:
            raise ValueError("initial state out of range")
        width = 2 ** len(self.tests)
        for row in self.delta:
            if len(row) != width:
                raise ValueError("row width %d, expected %d" % (len(row), width))
            for entry in row:
                _check_entry(entry, self.actions, n)

    @property
    def n_states(self) -> int:
        return len(self.delta)

    def atom_list(self) -> List[Atom]:
        return atoms(self.tests)


@dataclass(frozen=True)
class MooreAutomaton:
    """delta[state][letter] with letter = atom.bits * len(actions) + action
    index; outputs[state][atom.bits] is the acceptance bit."""

    tests: TestSet
    actions: Tuple[str, ...]
    delta: Tuple[Tuple[int, ...], ...]
    outputs: Tuple[Tuple[int, ...], ...]
    initial: int

    def __post_init__(self):
        n = len(self.delta)
        if n == 0 or len(self.outputs) != n:
            raise ValueError("delta and outputs must cover the same states")
        if not 0 <= self.initial < n:
            raise ValueError("initial state out of range")
        n_atoms = 2 ** len(self.tests)
        width = n_atoms * len(self.actions)
        for row in self.delta:
            if len(row) != width or any(not 0 <= y < n for y in row):
                raise ValueError("bad transition row: %r" % (row,))
        for row in self.outputs:
            if len(row) != n_atoms or any(bit not in (0, 1) for bit in row):
                raise ValueError("bad output row: %r" % (row,))

    @property
    def n_states(self) -> int:
        return len(self.delta)

    def letters(self) -> List[Tuple[Atom, str]]:
        """All (atom, action) letters in canonical order."""
        return [(a, p) for a in atoms(self.tests) for p in self.actions]

    def letter_index(self, atom: Atom, action: str) -> int:
        return atom.bits * len(self.actions) + self.actions.index(action)


# ===== Acceptance =====


def accepts_gkat(aut: GkatAutomaton, state: int, w: GuardedString) -> int:
    """Run w from the given state; 1 iff the word is accepted."""
    if w.atoms[0].tests != aut.tests.tests:
        raise ValueError("word atoms use different tests")
    x = state
    for i, p in enumerate(w.actions):
        entry = aut.delta[x][w.atoms[i].bits]
        if not isinstance(entry, tuple) or entry[0] != p:
            return 0
        x = entry[1]
    return 1 if aut.delta[x][w.last_atom.bits] == 1 else 0


def run_gkat_prefix(
    aut: GkatAutomaton, state: int, prefix: GuardedPrefix
) -> Optional[int]:
    """Follow a dangling word; None when some step is missing or mislabeled."""
    x = state
    for atom, p in prefix.pairs:
        entry = aut.delta[x][atom.bits]
        if not isinstance(entry, tuple) or entry[0] != p:
            return None
        x = entry[1]
    return x


def accepts_moore(aut: MooreAutomaton, state: int, w: GuardedString) -> int:
    """Follow w's letters, then read the output bit at its last atom."""
    if w.atoms[0].tests != aut.tests.tests:
        raise ValueError("word atoms use different tests")
    x = state
    for i, p in enumerate(w.actions):
        x = aut.delta[x][w.atoms[i].bits * len(aut.actions) + aut.actions.index(p)]
    return aut.outputs[x][w.last_atom.bits]


# ===== Reachability and normalization =====


def reachable(aut: GkatAutomaton):
    """Restrict to states reachable from the initial one.

    Returns the restricted automaton (states renumbered in breadth-first
    discovery order) and, per new state, a shortest dangling word reaching
    it.
    """
    ats = aut.atom_list()
    order = [aut.initial]
    index = {aut.initial: 0}
    witness = {aut.initial: EMPTY_PREFIX}
    queue = deque([aut.initial])
    while queue:
        x = queue.popleft()
        for bits, entry in enumerate(aut.delta[x]):
            if isinstance(entry, tuple):
                p, y = entry
                if y not in index:
                    index[y] = len(order)
                    order.append(y)
                    witness[y] = witness[x].extend(ats[bits], p)
                    queue.append(y)
    delta = []
    for x in order:
        row = []
        for entry in aut.delta[x]:
            if isinstance(entry, tuple):
                row.append((entry[0], index[entry[1]]))
            else:
                row.append(entry)
        delta.append(tuple(row))
    out = GkatAutomaton(aut.tests, aut.actions, tuple(delta), 0)
    return out, tuple(witness[x] for x in order)


def _live_states(aut: GkatAutomaton):
    live = {x for x in range(aut.n_states) if 1 in aut.delta[x]}
    changed = True
    while changed:
        changed = False
        for x in range(aut.n_states):
            if x in live:
                continue
            for entry in aut.delta[x]:
                if isinstance(entry, tuple) and entry[1] in live:
                    live.add(x)
                    changed = True
                    break
    return live


def is_normal(aut: GkatAutomaton) -> int:
    """1 iff every step leads to a state with nonempty language."""
    live = _live_states(aut)
    for row in aut.delta:
        for entry in row:
            if isinstance(entry, tuple) and entry[1] not in live:
                return 0
    return 1


def normalize(aut: GkatAutomaton) -> GkatAutomaton:
    """Rewrite steps into dead states as rejections; preserves languages."""
    live = _live_states(aut)
    delta = []
    for row in aut.delta:
        new_row = []
        for entry in row:
            if isinstance(entry, tuple) and entry[1] not in live:
                new_row.append(0)
            else:
                new_row.append(entry)
        delta.append(tuple(new_row))
    return GkatAutomaton(aut.tests, aut.actions, tuple(delta), aut.initial)


# ===== Comparison =====


def _check_same_alphabet(a, b):
    if a.tests != b.tests or a.actions != b.actions:
        raise ValueError("automata declare different tests or actions")


def bisimilar(
    a: GkatAutomaton, x: int, b: GkatAutomaton, y: int
) -> Tuple[int, Optional[GuardedString]]:
    """Decide bisimilarity of two states.

    On failure, also search for a shortest guarded string the two states
    disagree on; for normal automata one always exists, otherwise the
    witness may be None even though the states are not bisimilar.
    """
    _check_same_alphabet(a, b)
    seen = {(x, y)}
    queue = deque([(x, y)])
    matched = True
    while queue and matched:
        u, v = queue.popleft()
        for bits in range(2 ** len(a.tests)):
            e1 = a.delta[u][bits]
            e2 = b.delta[v][bits]
            if isinstance(e1, tuple) and isinstance(e2, tuple):
                if e1[0] != e2[0]:
                    matched = False
                    break
                pair = (e1[1], e2[1])
                if pair not in seen:
                    seen.add(pair)
                    queue.append(pair)
            elif e1 != e2:
                matched = False
                break
    if matched:
        return 1, None
    m1 = embed_moore(replace(a, initial=x))
    m2 = embed_moore(replace(b, initial=y))
    return 0, moore_difference_gs(m1, m2)


def similar(a: GkatAutomaton, x: int, b: GkatAutomaton, y: int) -> int:
    """Decide the one-sided simulation: accepts of x must be matched by y,
    steps of x must be matched by steps of y on the same action."""
    _check_same_alphabet(a, b)
    n_atoms = 2 ** len(a.tests)
    rel = [[True] * b.n_states for _ in range(a.n_states)]
    changed = True
    while changed:
        changed = False
        for u in range(a.n_states):
            for v in range(b.n_states):
                if not rel[u][v]:
                    continue
                ok = True
                for bits in range(n_atoms):
                    e1 = a.delta[u][bits]
                    e2 = b.delta[v][bits]
                    if e1 == 1:
                        if e2 != 1:
                            ok = False
                            break
                    elif isinstance(e1, tuple):
                        if (
                            not isinstance(e2, tuple)
                            or e1[0] != e2[0]
                            or not rel[e1[1]][e2[1]]
                        ):
                            ok = False
                            break
                if not ok:
                    rel[u][v] = False
                    changed = True
    return int(rel[x][y])


# ===== Minimization =====


def _refine_blocks(delta, n_states, initial_block):
    block = list(initial_block)
    while True:
        keys = []
        for x in range(n_states):
            row = []
            for entry in delta[x]:
                if isinstance(entry, tuple):
                    row.append((entry[0], block[entry[1]]))
                else:
                    row.append(entry)
            keys.append((block[x], tuple(row)))
        mapping = {}
        new = [mapping.setdefault(keys[x], len(mapping)) for x in range(n_states)]
        if new == block:
            return block
        block = new


def minimize(aut: GkatAutomaton) -> GkatAutomaton:
    """Quotient the reachable part by bisimilarity.

    Requires a normal automaton; for those the result is the unique
    smallest normal automaton for the language, up to isomorphism.
    """
    if not is_normal(aut):
        raise NotNormalError("minimize needs a normal automaton")
    base, _ = reachable(aut)
    block = _refine_blocks(base.delta, base.n_states, [0] * base.n_states)
    n_blocks = max(block) + 1
    rep = {}
    for x in range(base.n_states):
        rep.setdefault(block[x], x)
    delta = []
    for b in range(n_blocks):
        row = []
        for entry in base.delta[rep[b]]:
            if isinstance(entry, tuple):
                row.append((entry[0], block[entry[1]]))
            else:
                row.append(entry)
        delta.append(tuple(row))
    return GkatAutomaton(aut.tests, aut.actions, tuple(delta), block[0])


def _is_observable(aut: GkatAutomaton) -> bool:
    block = _refine_blocks(aut.delta, aut.n_states, [0] * aut.n_states)
    return max(block) + 1 == aut.n_states


def isomorphic(
    a: GkatAutomaton, b: GkatAutomaton
) -> Tuple[int, Optional[Dict[int, int]]]:
    """Check isomorphism of two minimal automata.

    Both inputs must be reachable and observable (minimization outputs);
    then the only candidate map is the one forced by synchronized
    traversal from the initial states.
    """
    _check_same_alphabet(a, b)
    for aut in (a, b):
        if reachable(aut)[0].n_states != aut.n_states:
            raise ValueError("isomorphic needs reachable inputs")
        if not _is_observable(aut):
            raise ValueError("isomorphic needs observable inputs")
    if a.n_states != b.n_states:
        return 0, None
    mapping = {a.initial: b.initial}
    used = {b.initial}
    queue = deque([a.initial])
    while queue:
        u = queue.popleft()
        v = mapping[u]
        for bits in range(2 ** len(a.tests)):
            e1 = a.delta[u][bits]
            e2 = b.delta[v][bits]
            if isinstance(e1, tuple) and isinstance(e2, tuple):
                if e1[0] != e2[0]:
                    return 0, None
                t1, t2 = e1[1], e2[1]
                if t1 in mapping:
                    if mapping[t1] != t2:
                        return 0, None
                elif t2 in used:
                    return 0, None
                else:
                    mapping[t1] = t2
                    used.add(t2)
                    queue.append(t1)
            elif e1 != e2:
                return 0, None
    if len(mapping) != a.n_states:
        return 0, None
    return 1, mapping


# ===== Moore machines =====


def embed_moore(aut: GkatAutomaton) -> MooreAutomaton:
    """Unfold a guarded automaton into a Moore machine.

    Adds one sink state collecting every (atom, action) letter the source
    state does not step on; the sink outputs 0 everywhere, so both
    machines describe the same guarded language.
    """
    n = aut.n_states
    sink = n
    n_atoms = 2 ** len(aut.tests)
    delta = []
    outputs = []
    for x in range(n):
        row = []
        out = []
        for bits in range(n_atoms):
            entry = aut.delta[x][bits]
            out.append(1 if entry == 1 else 0)
            for p in aut.actions:
                if isinstance(entry, tuple) and entry[0] == p:
                    row.append(entry[1])
                else:
                    row.append(sink)
        delta.append(tuple(row))
        outputs.append(tuple(out))
    delta.append(tuple([sink] * (n_atoms * len(aut.actions))))
    outputs.append(tuple([0] * n_atoms))
    return MooreAutomaton(
        aut.tests, aut.actions, tuple(delta), tuple(outputs), aut.initial
    )


def moore_reachable(aut: MooreAutomaton) -> MooreAutomaton:
    """Restrict to reachable states, renumbered in discovery order."""
    order = [aut.initial]
    index = {aut.initial: 0}
    queue = deque([aut.initial])
    while queue:
        x = queue.popleft()
        for y in aut.delta[x]:
            if y not in index:
                index[y] = len(order)
                order.append(y)
                queue.append(y)
    delta = tuple(tuple(index[y] for y in aut.delta[x]) for x in order)
    outputs = tuple(aut.outputs[x] for x in order)
    return MooreAutomaton(aut.tests, aut.actions, delta, outputs, 0)


def minimize_moore(aut: MooreAutomaton) -> MooreAutomaton:
    """Standard Moore machine minimization, deterministic state order."""
    base = moore_reachable(aut)
    out_key = {}
    initial_block = [
        out_key.setdefault(base.outputs[x], len(out_key))
        for x in range(base.n_states)
    ]
    block = initial_block
    while True:
        keys = [
            (block[x], tuple(block[y] for y in base.delta[x]))
            for x in range(base.n_states)
        ]
        mapping = {}
        new = [mapping.setdefault(keys[x], len(mapping)) for x in range(base.n_states)]
        if new == block:
            break
        block = new
    n_blocks = max(block) + 1
    rep = {}
    for x in range(base.n_states):
        rep.setdefault(block[x], x)
    delta = tuple(
        tuple(block[y] for y in base.delta[rep[b]]) for b in range(n_blocks)
    )
    outputs = tuple(base.outputs[rep[b]] for b in range(n_blocks))
    return MooreAutomaton(aut.tests, aut.actions, delta, outputs, block[0])


def moore_isomorphic(
    a: MooreAutomaton, b: MooreAutomaton
) -> Tuple[int, Optional[Dict[int, int]]]:
    """Isomorphism of reachable Moore machines by synchronized traversal."""
    _check_same_alphabet(a, b)
    for aut in (a, b):
        if moore_reachable(aut).n_states != aut.n_states:
            raise ValueError("moore_isomorphic needs reachable inputs")
    if a.n_states != b.n_states:
        return 0, None
    mapping = {a.initial: b.initial}
    used = {b.initial}
    queue = deque([a.initial])
    while queue:
        u = queue.popleft()
        v = mapping[u]
        if a.outputs[u] != b.outputs[v]:
            return 0, None
        for letter in range(len(a.delta[u])):
            t1 = a.delta[u][letter]
            t2 = b.delta[v][letter]
            if t1 in mapping:
                if mapping[t1] != t2:
                    return 0, None
            elif t2 in used:
                return 0, None
            else:
                mapping[t1] = t2
                used.add(t2)
                queue.append(t1)
    if len(mapping) != a.n_states:
        return 0, None
    return 1, mapping


def moore_difference(
    a: MooreAutomaton, b: MooreAutomaton
) -> Optional[Tuple[Tuple[Atom, str], ...]]:
    """Shortest letter word after which the two machines' output rows
    differ, or None if they agree everywhere (same guarded language)."""
    _check_same_alphabet(a, b)
    letters = a.letters()
    start = (a.initial, b.initial)
    pred = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        u, v = pair
        if a.outputs[u] != b.outputs[v]:
            word = []
            while pred[pair] is not None:
                pair, i = pred[pair]
                word.append(letters[i])
            word.reverse()
            return tuple(word)
        for i in range(len(letters)):
            nxt = (a.delta[u][i], b.delta[v][i])
            if nxt not in pred:
                pred[nxt] = (pair, i)
                queue.append(nxt)
    return None


def moore_difference_gs(
    a: MooreAutomaton, b: MooreAutomaton
) -> Optional[GuardedString]:
    """Like moore_difference, extended with the first atom whose output
    bit disagrees, making a complete guarded string."""
    word = moore_difference(a, b)
    if word is None:
        return None
    u, v = a.initial, b.initial
    for atom, p in word:
        i = a.letter_index(atom, p)
        u = a.delta[u][i]
        v = b.delta[v][i]
    ats = atoms(a.tests)
    for bits in range(len(ats)):
        if a.outputs[u][bits] != b.outputs[v][bits]:
            return GuardedString(
                tuple(atom for atom, _ in word) + (ats[bits],),
                tuple(p for _, p in word),
            )
    raise AssertionError("difference vanished during replay")


# ===== Uniform continuation =====


def uniform_continuation(
    aut: GkatAutomaton, states, continuation: Tuple[Trans, ...]
) -> GkatAutomaton:
    """Replace each accept of the chosen states by the per-atom entry of
    `continuation`, leaving everything else in place."""
    n_atoms = 2 ** len(aut.tests)
    if len(continuation) != n_atoms:
        raise ValueError("continuation must give one entry per atom")
    for entry in continuation:
        _check_entry(entry, aut.actions, aut.n_states)
    chosen = set(states)
    for x in chosen:
        if not 0 <= x < aut.n_states:
            raise ValueError("state %r out of range" % (x,))
    delta = []
    for x in range(aut.n_states):
        if x in chosen:
            row = tuple(
                continuation[bits] if aut.delta[x][bits] == 1 else aut.delta[x][bits]
                for bits in range(n_atoms)
            )
        else:
            row = aut.delta[x]
        delta.append(row)
    return GkatAutomaton(aut.tests, aut.actions, tuple(delta), aut.initial)


# ===== DOT output =====


def _dot_quote(s: str) -> str:
    s = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return '"' + s + '"'


def gkat_dot(aut: GkatAutomaton, name: str = "gkat") -> str:
    """Graphviz rendering; accepting atoms are listed inside the node."""
    ats = aut.atom_list()
    lines = ["digraph %s {" % name, "  rankdir=LR;", "  node [shape=circle];"]
    lines.append("  init [shape=point];")
    for x in range(aut.n_states):
        accepted = [
            "%s | 1" % ats[bits]
            for bits in range(len(ats))
            if aut.delta[x][bits] == 1
        ]
        label = "x%d" % x
        if accepted:
            label += "\n" + "\n".join(accepted)
        lines.append("  s%d [label=%s];" % (x, _dot_quote(label)))
    lines.append("  init -> s%d;" % aut.initial)
    for x in range(aut.n_states):
        for bits in range(len(ats)):
            entry = aut.delta[x][bits]
            if isinstance(entry, tuple):
                label = "%s | %s" % (ats[bits], entry[0])
                lines.append(
                    "  s%d -> s%d [label=%s];" % (x, entry[1], _dot_quote(label))
                )
    lines.append("}")
    return "\n".join(lines) + "\n"


def moore_dot(aut: MooreAutomaton, name: str = "moore") -> str:
    """Graphviz rendering; node labels carry the per-atom output bits."""
    ats = atoms(aut.tests)
    lines = ["digraph %s {" % name, "  rankdir=LR;", "  node [shape=circle];"]
    lines.append("  init [shape=point];")
    for x in range(aut.n_states):
        vector = " + ".join(
            "%d%s" % (aut.outputs[x][bits], ats[bits]) for bits in range(len(ats))
        )
        label = "x%d\n%s" % (x, vector)
        lines.append("  s%d [label=%s];" % (x, _dot_quote(label)))
    lines.append("  init -> s%d;" % aut.initial)
    for x in range(aut.n_states):
        for bits in range(len(ats)):
            for j, p in enumerate(aut.actions):
                y = aut.delta[x][bits * len(aut.actions) + j]
                label = "%s%s" % (ats[bits], p)
                lines.append("  s%d -> s%d [label=%s];" % (x, y, _dot_quote(label)))
    lines.append("}")
    return "\n".join(lines) + "\n"
