"""Active learning from observation tables.

Two learners share the same loop shape: fill an observation table, close
it by promoting unmatched fringe rows, read off a hypothesis, and ask the
teacher for equivalence; counterexamples contribute all their suffixes as
new columns.

The guarded learner's rows are dangling words and its columns are guarded
strings (one cell costs one membership query); the classic Moore learner's
rows and columns are (atom, action) letter words, and every cell costs one
query per atom. Query counters tally raw queries as issued, with no
memoization across cells; an optional deduction mode fills cells that are
forced to zero by determinacy of guarded languages without consulting the
teacher.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .errors import InternalInconsistencyError, NotClosedError
from .automata import (
    GkatAutomaton,
    MooreAutomaton,
    accepts_gkat,
    accepts_moore,
    embed_moore,
    moore_difference,
    moore_difference_gs,
    run_gkat_prefix,
)
from .syntax import (
    Atom,
    EMPTY_PREFIX,
    GuardedPrefix,
    GuardedString,
    TestSet,
    atoms,
    suffixes_gs,
    suffixes_word,
)


@dataclass
class QueryStats:
    membership_queries: int = 0
    zero_filled: int = 0
    equivalence_queries: int = 0
    hypothesis_sizes: List[int] = field(default_factory=list)


# ===== Teachers =====


class Teacher:
    """Black box for a fixed guarded language."""

    def membership(self, w: GuardedString) -> int:
        raise NotImplementedError

    def equivalence(self, hypothesis):
        """None when the hypothesis matches, else a counterexample."""
        raise NotImplementedError


class GkatTeacher(Teacher):
    """Teacher for the language of a guarded automaton.

    Equivalence is decided on the Moore unfoldings of hypothesis and
    target; counterexamples are shortest in the canonical order, returned
    as complete guarded strings.
    """

    def __init__(self, target: GkatAutomaton):
        self.target = target
        self._target_moore = embed_moore(target)

    def membership(self, w: GuardedString) -> int:
        return accepts_gkat(self.target, self.target.initial, w)

    def equivalence(self, hypothesis: GkatAutomaton) -> Optional[GuardedString]:
        return moore_difference_gs(embed_moore(hypothesis), self._target_moore)


class MooreTeacher(Teacher):
    """Teacher for the guarded language of a Moore machine; counterexamples
    are letter words."""

    def __init__(self, target: MooreAutomaton):
        self.target = target

    def membership(self, w: GuardedString) -> int:
        return accepts_moore(self.target, self.target.initial, w)

    def equivalence(self, hypothesis: MooreAutomaton):
        return moore_difference(hypothesis, self.target)


def teacher_from_gkat(target: GkatAutomaton) -> GkatTeacher:
    return GkatTeacher(target)


def teacher_from_moore(target: MooreAutomaton) -> MooreTeacher:
    return MooreTeacher(target)


# ===== Event formatting =====


def _word_str(word) -> str:
    if not word:
        return "ε"
    return "".join(str(a) + p for a, p in word)


def _payload_str(value) -> str:
    if isinstance(value, (GuardedString, GuardedPrefix)):
        return str(value)
    return _word_str(value)


def format_event(kind: str, payload) -> str:
    """One trace line per learner event."""
    if kind == "query":
        w, bit = payload
        return "QUERY %s → %d" % (w, bit)
    if kind == "promote":
        return "PROMOTE %s" % _payload_str(payload)
    if kind == "columns":
        return "COLUMNS {%s}" % ", ".join(_payload_str(e) for e in payload)
    if kind == "hypothesis":
        return "HYPOTHESIS %d states" % payload
    if kind == "equiv":
        if payload is None:
            return "EQUIV → Yes"
        return "EQUIV → No(%s)" % _payload_str(payload)
    raise ValueError("unknown event kind: %r" % (kind,))


# ===== Guarded observation table =====


class GlObservationTable:
    """Rows are dangling words, columns are guarded strings.

    The upper rows S start at the empty word and stay prefix-closed; the
    columns E start with all length-one atoms and stay suffix-closed.
    Fringe rows extend an upper row by one (atom, action) letter; only
    fringe rows with a one somewhere need a matching upper row for the
    table to be closed.
    """

    def __init__(
        self,
        tests: TestSet,
        actions: Tuple[str, ...],
        teacher: Teacher,
        stats: QueryStats,
        zero_fill: bool = False,
        on_event: Optional[Callable] = None,
    ):
        self.tests = tests
        self.actions = tuple(actions)
        self.teacher = teacher
        self.stats = stats
        self.zero_fill = zero_fill
        self.on_event = on_event
        self.atoms = atoms(tests)
        self.letters = [(a, p) for a in self.atoms for p in self.actions]
        self.S: List[GuardedPrefix] = [EMPTY_PREFIX]
        self._s_set = {EMPTY_PREFIX}
        self.E: List[GuardedString] = [GuardedString((a,), ()) for a in self.atoms]
        self._e_set = set(self.E)
        self.cells: Dict[Tuple[GuardedPrefix, GuardedString], int] = {}
        self.deduced = set()
        self._emit("columns", tuple(self.E))

    def _emit(self, kind, payload):
        if self.on_event is not None:
            self.on_event(kind, payload, self)

    def all_rows(self) -> List[GuardedPrefix]:
        rows = list(self.S)
        seen = set(self._s_set)
        for s in self.S:
            for a, p in self.letters:
                t = s.extend(a, p)
                if t not in seen:
                    seen.add(t)
                    rows.append(t)
        return rows

    def row(self, t: GuardedPrefix) -> Tuple[int, ...]:
        return tuple(self.cells[(t, e)] for e in self.E)

    def _atom_column(self, atom: Atom) -> GuardedString:
        return GuardedString((atom,), ())

    def _deducible_zero(self, t: GuardedPrefix) -> bool:
        # Fringe rows only: a cell is forced to zero when the parent row
        # accepts at the last atom, or when a sibling on another action is
        # already known to reach an accepting continuation.
        if not t.pairs or t in self._s_set:
            return False
        parent = GuardedPrefix(t.pairs[:-1])
        if parent not in self._s_set:
            return False
        atom, action = t.pairs[-1]
        if self.cells.get((parent, self._atom_column(atom))) == 1:
            return True
        for q in self.actions:
            if q == action:
                continue
            sibling = parent.extend(atom, q)
            for e in self.E:
                if self.cells.get((sibling, e)) == 1:
                    return True
        return False

    def _fill_cell(self, t: GuardedPrefix, e: GuardedString):
        key = (t, e)
        if key in self.cells:
            return
        if self.zero_fill and self._deducible_zero(t):
            self.cells[key] = 0
            self.deduced.add(key)
            self.stats.zero_filled += 1
            return
        w = t.join(e)
        bit = self.teacher.membership(w)
        self.stats.membership_queries += 1
        self.cells[key] = bit
        self._emit("query", (w, bit))

    def fill(self):
        for t in self.all_rows():
            for e in self.E:
                self._fill_cell(t, e)
        return self

    def apply_zero_fill(self):
        """Fill every missing cell whose value determinacy already forces,
        without consulting the teacher."""
        for t in self.all_rows():
            if not self._deducible_zero(t):
                continue
            for e in self.E:
                key = (t, e)
                if key not in self.cells:
                    self.cells[key] = 0
                    self.deduced.add(key)
                    self.stats.zero_filled += 1
        return self

    def unclosed_row(self) -> Optional[GuardedPrefix]:
        upper = {self.row(s) for s in self.S}
        for t in self.all_rows():
            if t in self._s_set:
                continue
            r = self.row(t)
            if any(r) and r not in upper:
                return t
        return None

    def promote(self, t: GuardedPrefix):
        self.S.append(t)
        self._s_set.add(t)
        self._emit("promote", t)
        self.fill()

    def close(self):
        while True:
            t = self.unclosed_row()
            if t is None:
                return self
            self.promote(t)

    def add_counterexample(self, z: GuardedString):
        for e in suffixes_gs(z):
            if e not in self._e_set:
                self.E.append(e)
                self._e_set.add(e)
        self._emit("columns", tuple(self.E))
        self.fill()

    def hypothesis(self) -> GkatAutomaton:
        """Read off the automaton; state i is the row of S[i].

        Per state and atom: step to the row of the unique live extension
        if there is one, else accept iff the atom column holds a one, else
        reject.
        """
        if self.unclosed_row() is not None:
            raise NotClosedError("table has an unmatched fringe row")
        row_index = {}
        for i, s in enumerate(self.S):
            r = self.row(s)
            if r in row_index:
                raise InternalInconsistencyError("duplicate upper rows")
            row_index[r] = i
        delta = []
        for s in self.S:
            entries = []
            for atom in self.atoms:
                live = []
                for p in self.actions:
                    if any(self.row(s.extend(atom, p))):
                        live.append(p)
                accepts = self.cells[(s, self._atom_column(atom))] == 1
                if len(live) > 1 or (live and accepts):
                    raise InternalInconsistencyError(
                        "observations branch at %s under %s" % (s, atom)
                    )
                if live:
                    p = live[0]
                    target = self.row(s.extend(atom, p))
                    if target not in row_index:
                        raise NotClosedError("fringe row has no upper match")
                    entries.append((p, row_index[target]))
                elif accepts:
                    entries.append(1)
                else:
                    entries.append(0)
            delta.append(tuple(entries))
        return GkatAutomaton(self.tests, self.actions, tuple(delta), 0)

    def snapshot(self):
        """Header and rows for external dumps."""
        header = ["row"] + [str(e) for e in self.E]
        body = []
        for t in self.all_rows():
            label = str(t) + (" *" if t in self._s_set else "")
            body.append([label] + [str(self.cells.get((t, e), "")) for e in self.E])
        return header, body


def close_table(table):
    return table.close()


def zero_fill(table):
    return table.apply_zero_fill()


def build_hypothesis(table):
    return table.hypothesis()


# ===== Guarded learner =====


def optimized_counterexample(
    table: GlObservationTable,
    z: GuardedString,
    teacher: Teacher,
    hypothesis: GkatAutomaton,
) -> GuardedString:
    """Shrink a counterexample before suffixing it into the table.

    Scans suffixes of z from shortest to longest; for each, replays the
    consumed part through the hypothesis, replants the suffix on that
    state's access word, and compares the teacher against the hypothesis
    state. The first disagreement found is the informative suffix; one
    always exists when z has at least one action.
    """
    m = z.n_actions
    if m == 0:
        return z
    for k in range(m, 0, -1):
        atom, action = z.atoms[k - 1], z.actions[k - 1]
        consumed = GuardedPrefix(tuple(zip(z.atoms[: k - 1], z.actions[: k - 1])))
        state = run_gkat_prefix(hypothesis, hypothesis.initial, consumed)
        if state is None:
            continue
        tail = GuardedString(z.atoms[k - 1 :], z.actions[k - 1 :])
        access = table.S[state]
        hyp_bit = accepts_gkat(hypothesis, state, tail)
        w = access.join(tail)
        real_bit = teacher.membership(w)
        table.stats.membership_queries += 1
        table._emit("query", (w, real_bit))
        if hyp_bit != real_bit:
            return GuardedString(z.atoms[k:], z.actions[k:])
    raise InternalInconsistencyError("counterexample has no informative suffix")


def glstar(
    teacher: Teacher,
    tests: TestSet,
    actions: Tuple[str, ...],
    cx_mode: str = "suffix",
    zero_fill: bool = False,
    on_event: Optional[Callable] = None,
) -> Tuple[GkatAutomaton, QueryStats]:
    """Learn a guarded automaton for the teacher's language.

    cx_mode 'suffix' adds all suffixes of each counterexample as columns;
    'optimized' first shrinks the counterexample to an informative suffix.
    """
    if cx_mode not in ("suffix", "optimized"):
        raise ValueError("unknown counterexample mode: %r" % (cx_mode,))
    stats = QueryStats()
    table = GlObservationTable(tests, actions, teacher, stats, zero_fill, on_event)
    table.fill()
    while True:
        table.close()
        hyp = table.hypothesis()
        stats.hypothesis_sizes.append(hyp.n_states)
        table._emit("hypothesis", hyp.n_states)
        if stats.equivalence_queries > 10 * (len(table.S) + 1):
            raise InternalInconsistencyError("equivalence query cap exceeded")
        z = teacher.equivalence(hyp)
        stats.equivalence_queries += 1
        table._emit("equiv", z)
        if z is None:
            return hyp, stats
        if cx_mode == "optimized":
            z = optimized_counterexample(table, z, teacher, hyp)
        table.add_counterexample(z)


# ===== Letter-word observation table =====


class LStarObservationTable:
    """Classic observation table over (atom, action) letter words.

    A cell holds the whole output row of the word: one bit per atom, each
    bit one membership query. Closedness has no one-entry side condition
    here; every fringe row needs a matching upper row.
    """

    def __init__(
        self,
        tests: TestSet,
        actions: Tuple[str, ...],
        teacher: Teacher,
        stats: QueryStats,
        on_event: Optional[Callable] = None,
    ):
        self.tests = tests
        self.actions = tuple(actions)
        self.teacher = teacher
        self.stats = stats
        self.on_event = on_event
        self.atoms = atoms(tests)
        self.letters = [(a, p) for a in self.atoms for p in self.actions]
        self.S: List[tuple] = [()]
        self._s_set = {()}
        self.E: List[tuple] = [()]
        self._e_set = {()}
        self.cells: Dict[Tuple[tuple, tuple], Tuple[int, ...]] = {}
        self._emit("columns", tuple(self.E))

    def _emit(self, kind, payload):
        if self.on_event is not None:
            self.on_event(kind, payload, self)

    def all_rows(self) -> List[tuple]:
        rows = list(self.S)
        seen = set(self._s_set)
        for s in self.S:
            for letter in self.letters:
                t = s + (letter,)
                if t not in seen:
                    seen.add(t)
                    rows.append(t)
        return rows

    def _fill_cell(self, t, e):
        key = (t, e)
        if key in self.cells:
            return
        word = t + e
        vec = []
        for atom in self.atoms:
            w = GuardedString(
                tuple(a for a, _ in word) + (atom,), tuple(p for _, p in word)
            )
            bit = self.teacher.membership(w)
            self.stats.membership_queries += 1
            self._emit("query", (w, bit))
            vec.append(bit)
        self.cells[key] = tuple(vec)

    def fill(self):
        for t in self.all_rows():
            for e in self.E:
                self._fill_cell(t, e)
        return self

    def row(self, t) -> tuple:
        return tuple(self.cells[(t, e)] for e in self.E)

    def unclosed_row(self):
        upper = {self.row(s) for s in self.S}
        for t in self.all_rows():
            if t not in self._s_set and self.row(t) not in upper:
                return t
        return None

    def promote(self, t):
        self.S.append(t)
        self._s_set.add(t)
        self._emit("promote", t)
        self.fill()

    def close(self):
        while True:
            t = self.unclosed_row()
            if t is None:
                return self
            self.promote(t)

    def add_counterexample(self, z: tuple):
        for e in suffixes_word(z):
            if e not in self._e_set:
                self.E.append(e)
                self._e_set.add(e)
        self._emit("columns", tuple(self.E))
        self.fill()

    def hypothesis(self) -> MooreAutomaton:
        """Read off the Moore machine; state i is the row of S[i]."""
        if self.unclosed_row() is not None:
            raise NotClosedError("table has an unmatched fringe row")
        row_index = {}
        for i, s in enumerate(self.S):
            r = self.row(s)
            if r in row_index:
                raise InternalInconsistencyError("duplicate upper rows")
            row_index[r] = i
        delta = []
        outputs = []
        for s in self.S:
            row = []
            for letter in self.letters:
                target = self.row(s + (letter,))
                if target not in row_index:
                    raise NotClosedError("fringe row has no upper match")
                row.append(row_index[target])
            delta.append(tuple(row))
            outputs.append(self.cells[(s, ())])
        return MooreAutomaton(
            self.tests, self.actions, tuple(delta), tuple(outputs), 0
        )

    def snapshot(self):
        header = ["row"] + [_word_str(e) for e in self.E]
        body = []
        for t in self.all_rows():
            label = _word_str(t) + (" *" if t in self._s_set else "")
            cells = []
            for e in self.E:
                vec = self.cells.get((t, e))
                cells.append("" if vec is None else "".join(str(b) for b in vec))
            body.append([label] + cells)
        return header, body


def lstar_moore(
    teacher: Teacher,
    tests: TestSet,
    actions: Tuple[str, ...],
    on_event: Optional[Callable] = None,
) -> Tuple[MooreAutomaton, QueryStats]:
    """Learn a Moore machine for the teacher's language over letter words."""
    stats = QueryStats()
    table = LStarObservationTable(tests, actions, teacher, stats, on_event)
    table.fill()
    while True:
        table.close()
        hyp = table.hypothesis()
        stats.hypothesis_sizes.append(hyp.n_states)
        table._emit("hypothesis", hyp.n_states)
        if stats.equivalence_queries > 10 * (len(table.S) + 1):
            raise InternalInconsistencyError("equivalence query cap exceeded")
        z = teacher.equivalence(hyp)
        stats.equivalence_queries += 1
        table._emit("equiv", z)
        if z is None:
            return hyp, stats
        table.add_counterexample(z)
