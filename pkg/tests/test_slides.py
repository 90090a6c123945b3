import random

import pytest
from hypothesis import given, settings, strategies as st

from hcork.grouppres import Presentation, Word, abelianize, comm, conj, inv, mul
from hcork.slides import (ArcClass, CommutatorTarget, DualState, MalformedWitness, SlideError,
                          ToriData, WitnessFactor, WitnessInsufficient, add_12_pair, add_23_pair,
                          double_slide, evaluate_expression, kill_commutators, l1_projection,
                          realize_arc_class, replay_state, slide, states_match)

from oracles import naive_inverse, naive_reduce


def two_handles(r1=(1,), r2=(2,), d1=(1,), d2=(2,)):
    return DualState.start(Presentation.from_lists(2, [r1, r2]),
                           Presentation.from_lists(2, [d1, d2]), ["a", "b"])


def oracle_double(r_a, r_b, lam, mu):
    """r_a [mu^-1 lam, r_b]^mu, computed with plain tuple operations."""
    x = naive_inverse(mu) + lam
    c = x + r_b + naive_inverse(x) + naive_inverse(r_b)
    return naive_reduce(r_a + mu + c + naive_inverse(mu))


def oracle_dual(rp_b, rp_a, lam3, mu3):
    """r'_b [mu' lam'^-1, r'_a]^(mu'^-1)."""
    x = mu3 + naive_inverse(lam3)
    c = x + rp_a + naive_inverse(x) + naive_inverse(rp_a)
    return naive_reduce(rp_b + naive_inverse(mu3) + c + mu3)


def test_concrete_double_slide():
    s = two_handles()
    out = double_slide(s, 1, 2, ArcClass.of((), ()), ArcClass.of((1,), ()))
    expected = mul(Word.of(1), conj(comm(inv(Word.of(1)), Word.of(2)), Word.of(1))).reduced
    assert out.r(1).reduced == expected == oracle_double((1,), (2,), (), (1,))


def test_trivial_arcs_change_nothing():
    s = two_handles()
    out = double_slide(s, 1, 2, ArcClass(), ArcClass())
    assert out.r(1).reduced == s.r(1).reduced
    assert out.dual(2).reduced == s.dual(2).reduced


def test_self_slide_rejected():
    with pytest.raises(SlideError):
        double_slide(two_handles(), 1, 1, ArcClass(), ArcClass())
    with pytest.raises(SlideError):
        slide(two_handles(), 1, 3)


gen2 = st.sampled_from([1, -1, 2, -2])
short = st.lists(gen2, max_size=4).map(tuple)


@settings(max_examples=300, deadline=None)
@given(short, short, short, short, short, short, short, short)
def test_double_slide_matches_formulas(r1, r2, d1, d2, l1, l3, m1, m3):
    s = two_handles(r1, r2, d1, d2)
    out = double_slide(s, 1, 2, ArcClass.of(l1, l3), ArcClass.of(m1, m3))
    assert out.r(1).reduced == oracle_double(naive_reduce(r1), naive_reduce(r2),
                                             naive_reduce(l1), naive_reduce(m1))
    assert out.dual(2).reduced == oracle_dual(naive_reduce(d2), naive_reduce(d1),
                                              naive_reduce(l3), naive_reduce(m3))
    # same g1 component: r_alpha unchanged
    same = double_slide(s, 1, 2, ArcClass.of(l1, l3), ArcClass.of(l1, m3))
    assert same.r(1).reduced == naive_reduce(r1)
    assert same.r(2).raw == s.r(2).raw and same.dual(1).raw == s.dual(1).raw


def test_single_slide_is_dual():
    s = two_handles()
    out = slide(s, 1, 2, ArcClass.of((1,), (2,)), -1)
    assert out.r(1).reduced == naive_reduce((1, 1, -2, -1))
    assert out.dual(2).reduced == naive_reduce((2, -2, -1, 2))


def test_pairs_and_replay():
    s = two_handles()
    s = add_23_pair(s, "P1")
    s = add_12_pair(s, "S1")
    assert s.l1.rank == 3 and s.l3.rank == 3
    assert s.r(3).is_trivial and s.dual(3).reduced == (3,)
    assert s.r(4).reduced == (3,) and s.dual(4).is_trivial
    assert s.spare_pairs == 1
    s = slide(s, 1, 4, ArcClass.of((2,), (1,)), 1)
    assert states_match(replay_state(s), s)
    assert s.log[-1].kind == "slide"


def test_empty_targets_leave_state():
    s = two_handles()
    assert states_match(kill_commutators(s, []), s)


def test_kill_one_commutator():
    # duals z1, z2 kill pi_1(L3); handle 3 carries a nontrivial relator
    l1 = Presentation.from_lists(2, [[1], [2], []])
    l3 = Presentation.from_lists(2, [[1], [2], [1, 1, 2, -1, -2]])
    s = DualState.start(l1, l3, ["H1", "H2", "H3"])
    t = CommutatorTarget(3, (2,), (1,), (), (WitnessFactor(1, ()),))
    out = kill_commutators(s, [t])
    target = mul(Word.of(1, 1, 2, -1, -2), comm(Word.of(2), Word.of(1))).reduced
    assert out.dual(3).reduced == target == (1,)
    assert out.spare_pairs == 1
    assert l1_projection(out, 3) == [r.reduced for r in s.l1.relators]
    assert states_match(replay_state(out), out)


def test_kill_with_conjugated_witness():
    l1 = Presentation.from_lists(1, [[1], []])
    l3 = Presentation.from_lists(2, [[1], [2]])
    s = DualState.start(l1, l3, ["H1", "H2"])
    b = (2, 1, -2)
    t = CommutatorTarget(2, (2,), b, (1,), (WitnessFactor(1, (2,)),))
    out = kill_commutators(s, [t])
    expect = mul(Word.of(2), conj(comm(Word.of(2), Word(b)), Word.of(1))).reduced
    assert out.dual(2).reduced == expect


def test_malformed_witness():
    s = two_handles()
    bad = CommutatorTarget(2, (1,), (1, 2), (), (WitnessFactor(1, ()),))
    with pytest.raises(MalformedWitness):
        kill_commutators(s, [bad])
    with pytest.raises(MalformedWitness):
        kill_commutators(s, [CommutatorTarget(9, (1,), (1,), (), (WitnessFactor(1, ()),))])
    with pytest.raises(MalformedWitness):
        kill_commutators(s, [CommutatorTarget(1, (1,), (1,), (), (WitnessFactor(7, ()),))])


def test_abelianizations_preserved():
    rng = random.Random(4)
    letters = [1, -1, 2, -2]
    for _ in range(100):
        def w(k):
            return tuple(rng.choice(letters) for _ in range(rng.randint(0, k)))
        s = two_handles(w(4), w(4), w(4), w(4))
        out = double_slide(s, 1, 2,
                           ArcClass.of(w(3), w(3)), ArcClass.of(w(3), w(3)))
        for a, b in ((s.l1, out.l1), (s.l3, out.l3)):
            assert abelianize(a) == abelianize(b)


def test_witness_json_round_trip():
    t = CommutatorTarget(3, (1,), (2, -1), (), (WitnessFactor(1, (2,), -1),))
    assert CommutatorTarget.from_json(t.to_json()) == t


def _tori():
    l1 = Presentation.from_lists(2, [[1], [2]])
    l3 = Presentation.from_lists(2, [[1], [2]])
    return ToriData.from_state(DualState.start(l1, l3, ["a", "b"]))


def test_realize_trivial_target():
    assert realize_arc_class(ArcClass(), _tori()) == []


def test_realize_g1_only():
    tori = _tori()
    expr = realize_arc_class(ArcClass.of((1, 2), ()), tori)
    assert all(f.family == 3 for f in expr)
    got = evaluate_expression(expr, tori)
    assert got.g1.reduced == (1, 2) and got.g3.is_trivial


def test_realize_two_factor_target():
    tori = _tori()
    expr = realize_arc_class(ArcClass.of((1,), (2,)), tori)
    assert len(expr) == 2
    got = evaluate_expression(expr, tori)
    assert got.g1.reduced == (1,) and got.g3.reduced == (2,)


def test_realize_insufficient():
    l1 = Presentation.from_lists(2, [[1, 1]])
    l3 = Presentation.from_lists(1, [[1]])
    tori = ToriData.from_state(DualState.start(l1, l3, ["a"]))
    with pytest.raises(WitnessInsufficient):
        realize_arc_class(ArcClass.of((2,), ()), tori, max_factors=2)


def test_tori_invariants_and_witnesses():
    with pytest.raises(ValueError):
        ToriData((ArcClass.of((1,), ()),), (ArcClass.of((1,), ()),), 1, 1)
    w = _tori().witnesses(1000)
    assert w["gamma1_generate_l3"].is_yes and w["gamma3_generate_l1"].is_yes


def test_dual_state_validation():
    with pytest.raises(SlideError):
        DualState(Presentation.from_lists(1, [[1]]), Presentation.from_lists(1, []), ("a",))
    with pytest.raises(SlideError):
        DualState(Presentation.from_lists(1, [[1]]), Presentation.from_lists(1, [[1]]), ("a",),
                  pairing=(2,))
