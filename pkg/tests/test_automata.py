import random

import pytest

from gkat import (
    EMPTY_PREFIX,
    GkatAutomaton,
    GuardedPrefix,
    GuardedString,
    MooreAutomaton,
    NotNormalError,
    TestSet,
    accepts_gkat,
    accepts_moore,
    atoms,
    bisimilar,
    embed_moore,
    gkat_dot,
    is_normal,
    isomorphic,
    minimize,
    minimize_moore,
    moore_difference,
    moore_difference_gs,
    moore_dot,
    moore_isomorphic,
    moore_reachable,
    normalize,
    reachable,
    run_gkat_prefix,
    similar,
    uniform_continuation,
    unrolled_while_automaton,
)
from helpers import (
    enumerate_guarded_strings,
    rand_automaton,
    rand_normal_automaton,
)

T1 = TestSet(("b",))
ACTS = ("p", "q")
NEG, POS = atoms(T1)


def fixture():
    return unrolled_while_automaton()


def minimal_loop():
    """Two-state machine for 'loop on p while b, then q and stop'."""
    return GkatAutomaton(
        T1, ACTS, delta=(((("q", 1)), ("p", 0)), (1, 1)), initial=0
    )


def expected_moore():
    # embed_moore(minimal_loop()): states 0, 1, sink 2
    return MooreAutomaton(
        T1,
        ACTS,
        delta=((2, 1, 0, 2), (2, 2, 2, 2), (2, 2, 2, 2)),
        outputs=((0, 0), (1, 1), (0, 0)),
        initial=0,
    )


def _gs(ats, acts):
    return GuardedString(tuple(ats), tuple(acts))


# ===== construction checks =====

def test_automaton_validation():
    with pytest.raises(ValueError):
        GkatAutomaton(T1, ACTS, ((0,),), 0)  # row too narrow
    with pytest.raises(ValueError):
        GkatAutomaton(T1, ACTS, ((0, 2),), 0)  # 2 is not an entry
    with pytest.raises(ValueError):
        GkatAutomaton(T1, ACTS, ((0, ("r", 0)),), 0)  # unknown action
    with pytest.raises(ValueError):
        GkatAutomaton(T1, ACTS, ((0, ("p", 5)),), 0)  # target out of range
    with pytest.raises(ValueError):
        GkatAutomaton(T1, ACTS, ((0, 0),), 3)  # bad initial


def test_moore_validation():
    with pytest.raises(ValueError):
        MooreAutomaton(T1, ACTS, ((0, 0, 0, 0),), (), 0)
    with pytest.raises(ValueError):
        MooreAutomaton(T1, ACTS, ((0, 0, 0, 9),), ((0, 0),), 0)
    with pytest.raises(ValueError):
        MooreAutomaton(T1, ACTS, ((0, 0, 0, 0),), ((0, 2),), 0)


def test_letters_canonical_order():
    m = expected_moore()
    assert [(str(a), p) for a, p in m.letters()] == [
        ("b̄", "p"),
        ("b̄", "q"),
        ("b", "p"),
        ("b", "q"),
    ]
    assert m.letter_index(POS, "q") == 3


# ===== runs =====

def test_accepts_gkat_on_fixture():
    f = fixture()
    assert accepts_gkat(f, 0, _gs((NEG, POS), ("q",))) == 1
    assert accepts_gkat(f, 0, _gs((NEG, NEG), ("q",))) == 1
    assert accepts_gkat(f, 0, _gs((POS, NEG, POS), ("p", "q"))) == 1
    assert accepts_gkat(f, 0, _gs((POS, NEG), ("q",))) == 0  # wrong action at b
    assert accepts_gkat(f, 0, _gs((POS, NEG), ("p",))) == 0  # stops mid-loop
    assert accepts_gkat(f, 0, _gs((POS,), ())) == 0


def test_accepts_rejects_foreign_atoms():
    f = fixture()
    other = atoms(TestSet(("c",)))
    with pytest.raises(ValueError):
        accepts_gkat(f, 0, _gs((other[0],), ()))


def test_run_gkat_prefix():
    f = fixture()
    assert run_gkat_prefix(f, 0, EMPTY_PREFIX) == 0
    assert run_gkat_prefix(f, 0, GuardedPrefix(((POS, "p"),))) == 1
    assert run_gkat_prefix(f, 0, GuardedPrefix(((POS, "q"),))) is None
    two = GuardedPrefix(((NEG, "q"), (POS, "p")))
    assert run_gkat_prefix(f, 0, two) is None  # accepting state has no steps


# ===== reachability, normal form =====

def test_reachable_discovery_order_and_witnesses():
    f = fixture()
    extra = GkatAutomaton(
        T1,
        ACTS,
        delta=f.delta + ((0, 0),),  # unreachable junk state
        initial=0,
    )
    out, witnesses = reachable(extra)
    assert out.n_states == 3
    # breadth-first over atoms in order: b̄ edge found before b edge
    assert [str(w) for w in witnesses] == ["ε", "b̄q", "bp"]
    assert accepts_gkat(out, 0, _gs((POS, NEG, POS), ("p", "q"))) == 1


def test_normalize_rewrites_dead_steps():
    dead_loop = GkatAutomaton(
        T1,
        ACTS,
        delta=(((("p", 1)), 1), ((("q", 1)), ("p", 1))),
        initial=0,
    )
    assert is_normal(dead_loop) == 0
    norm = normalize(dead_loop)
    assert is_normal(norm) == 1
    assert norm.delta == ((0, 1), (0, 0))
    for w in enumerate_guarded_strings(T1, ACTS, 2):
        assert accepts_gkat(dead_loop, 0, w) == accepts_gkat(norm, 0, w)


def test_normalize_random_preserves_language():
    rng = random.Random(5)
    words = enumerate_guarded_strings(T1, ACTS, 3)
    for _ in range(30):
        aut = rand_automaton(rng, T1, ACTS, rng.randint(1, 5))
        norm = normalize(aut)
        assert is_normal(norm) == 1
        assert norm.n_states == aut.n_states
        for w in words:
            assert accepts_gkat(aut, 0, w) == accepts_gkat(norm, 0, w)


# ===== bisimilarity and similarity =====

def test_fixture_states_bisimilar():
    f = fixture()
    assert bisimilar(f, 0, f, 1) == (1, None)
    assert bisimilar(f, 0, minimal_loop(), 0) == (1, None)


def test_bisimilar_witness_is_shortest():
    m = minimal_loop()
    stingy = GkatAutomaton(
        T1, ACTS, delta=(((("q", 1)), ("p", 0)), (1, 0)), initial=0
    )
    verdict, witness = bisimilar(m, 0, stingy, 0)
    assert verdict == 0
    assert str(witness) == "b̄qb"
    assert accepts_gkat(m, 0, witness) != accepts_gkat(stingy, 0, witness)
    assert witness.n_actions == 1


def test_bisimilar_without_witness_on_dead_pair():
    # both languages empty, still not bisimilar; no separating word exists
    a = GkatAutomaton(T1, ACTS, ((0, 0),), 0)
    b = GkatAutomaton(T1, ACTS, (((("p", 1)), 0), (0, 0)), 0)
    assert bisimilar(a, 0, b, 0) == (0, None)


def test_similar_examples():
    m = minimal_loop()
    assert similar(m, 0, m, 0) == 1
    assert similar(m, 1, m, 1) == 1
    assert similar(m, 0, m, 1) == 0  # loop words are not atom words
    assert similar(m, 1, m, 0) == 0

    only_b = GkatAutomaton(T1, ACTS, ((0, ("p", 1)), (1, 1)), 0)
    any_atom = GkatAutomaton(T1, ACTS, (((("p", 1)), ("p", 1)), (1, 1)), 0)
    assert similar(only_b, 0, any_atom, 0) == 1
    assert similar(any_atom, 0, only_b, 0) == 0


def test_mismatched_alphabets_rejected():
    m = minimal_loop()
    other = GkatAutomaton(TestSet(("c",)), ACTS, ((0, 0),), 0)
    with pytest.raises(ValueError):
        bisimilar(m, 0, other, 0)
    with pytest.raises(ValueError):
        similar(m, 0, other, 0)


# ===== minimization and isomorphism =====

def test_minimize_fixture():
    result = minimize(fixture())
    assert result.n_states == 2
    verdict, mapping = isomorphic(result, minimal_loop())
    assert verdict == 1
    assert mapping == {0: 0, 1: 1}


def test_minimize_idempotent():
    once = minimize(fixture())
    twice = minimize(once)
    assert isomorphic(once, twice)[0] == 1


def test_minimize_requires_normal():
    dead_loop = GkatAutomaton(
        T1, ACTS, delta=(((("p", 1)), 1), ((("q", 1)), ("p", 1))), initial=0
    )
    with pytest.raises(NotNormalError):
        minimize(dead_loop)
    assert minimize(normalize(dead_loop)).n_states == 1


def test_minimize_empty_language():
    aut = GkatAutomaton(T1, ACTS, ((0, 0), (1, 1)), 0)  # state 1 unreachable
    result = minimize(aut)
    assert result.n_states == 1
    assert result.delta == ((0, 0),)


def test_isomorphic_handles_permutation():
    m = minimal_loop()
    swapped = GkatAutomaton(T1, ACTS, ((1, 1), ((("q", 0)), ("p", 1))), 1)
    verdict, mapping = isomorphic(m, swapped)
    assert verdict == 1
    assert mapping == {0: 1, 1: 0}


def test_isomorphic_negative():
    m = minimal_loop()
    accepting = GkatAutomaton(T1, ACTS, ((1, 1),), 0)
    assert isomorphic(m, accepting) == (0, None)
    relabeled = GkatAutomaton(T1, ACTS, (((("p", 1)), ("q", 0)), (1, 1)), 0)
    assert isomorphic(m, relabeled) == (0, None)


def test_isomorphic_preconditions():
    unreachable = GkatAutomaton(T1, ACTS, ((0, 0), (1, 1)), 0)
    with pytest.raises(ValueError):
        isomorphic(unreachable, unreachable)
    # the fixture is reachable but has two bisimilar states
    with pytest.raises(ValueError):
        isomorphic(fixture(), fixture())


# ===== Moore machines =====

def test_embed_moore_exact():
    assert embed_moore(minimal_loop()) == expected_moore()


def test_embed_preserves_acceptance():
    f = fixture()
    m = embed_moore(f)
    for w in enumerate_guarded_strings(T1, ACTS, 3):
        assert accepts_moore(m, 0, w) == accepts_gkat(f, 0, w)


def test_minimize_moore_merges_unrolled_states():
    big = embed_moore(fixture())
    assert big.n_states == 4
    small = minimize_moore(big)
    assert small.n_states == 3
    assert moore_isomorphic(small, expected_moore())[0] == 1
    again = minimize_moore(small)
    assert moore_isomorphic(small, again)[0] == 1


def test_moore_reachable_trims():
    m = expected_moore()
    padded = MooreAutomaton(
        T1,
        ACTS,
        delta=m.delta + ((3, 3, 3, 3),),
        outputs=m.outputs + ((1, 0),),
        initial=0,
    )
    assert moore_reachable(padded).n_states == 3
    with pytest.raises(ValueError):
        moore_isomorphic(padded, m)


def test_moore_difference():
    m = expected_moore()
    assert moore_difference(m, m) is None
    tweaked = MooreAutomaton(
        T1, ACTS, m.delta, ((0, 0), (1, 0), (0, 0)), initial=0
    )
    word = moore_difference(m, tweaked)
    assert [(str(a), p) for a, p in word] == [("b̄", "q")]
    gs = moore_difference_gs(m, tweaked)
    assert str(gs) == "b̄qb"


def test_embedding_square_on_empty_language():
    # corner case: with an empty language the two routes give machines of
    # different sizes, and agree only after one more Moore minimization
    dead = GkatAutomaton(T1, ACTS, ((0, 0),), 0)
    route_a = embed_moore(minimize(dead))
    route_b = minimize_moore(embed_moore(dead))
    assert route_a.n_states == 2
    assert route_b.n_states == 1
    assert moore_isomorphic(route_a, route_b) == (0, None)
    assert moore_isomorphic(minimize_moore(route_a), route_b)[0] == 1


def test_embedding_square_on_live_automata():
    rng = random.Random(9)
    for _ in range(30):
        aut = rand_normal_automaton(rng, T1, ACTS, rng.randint(1, 5))
        if accepts_row_empty(aut):
            continue
        route_a = embed_moore(minimize(aut))
        route_b = minimize_moore(embed_moore(aut))
        assert moore_isomorphic(route_a, route_b)[0] == 1


def accepts_row_empty(aut):
    seen, _ = reachable(aut)
    return all(
        entry == 0 for row in seen.delta for entry in row
    )


# ===== uniform continuation =====

def test_uniform_continuation_replaces_accepts():
    m = minimal_loop()
    cont = (("p", 0), 0)
    out = uniform_continuation(m, [1], cont)
    assert out.delta[0] == m.delta[0]
    assert out.delta[1] == (("p", 0), 0)
    assert out.initial == m.initial


def test_uniform_continuation_validation():
    m = minimal_loop()
    with pytest.raises(ValueError):
        uniform_continuation(m, [0], (1,))  # wrong width
    with pytest.raises(ValueError):
        uniform_continuation(m, [7], (1, 1))  # bad state
    with pytest.raises(ValueError):
        uniform_continuation(m, [0], (("r", 0), 1))  # unknown action


# ===== DOT =====

def test_gkat_dot():
    text = gkat_dot(minimal_loop())
    assert text == gkat_dot(minimal_loop())
    assert 's0 -> s1 [label="b̄ | q"];' in text
    assert 's0 -> s0 [label="b | p"];' in text
    assert '"x1\\nb̄ | 1\\nb | 1"' in text
    assert "init -> s0;" in text


def test_moore_dot():
    text = moore_dot(expected_moore())
    assert '"x1\\n1b̄ + 1b"' in text
    assert 's0 -> s1 [label="b̄q"];' in text
    assert text.count("->") == 3 * 4 + 1
