import pytest
from hypothesis import given, settings, strategies as st

from conftest import EN_AR, EN_ES, utt
from cstrigger.association import (
    DIRECTIONS,
    MODES,
    SHARED_TYPES,
    ContingencyTable,
    ItemOccurrence,
    TestSpec,
    build_contingency,
    enumerate_items,
    near_switch,
)
from cstrigger.corpus import Corpus
from cstrigger.switches import SwitchPoint, utterance_switches
from cstrigger.synth import random_corpus
from oracles import oracle_table


def spec(shared_type="shared-l2", direction="both", mode="precede", distance=2, **kw):
    return TestSpec(shared_type, direction, mode, distance, **kw)


class TestTestSpec:
    @pytest.mark.parametrize("kw", [
        {"shared_type": "shared-fr"},
        {"direction": "sideways"},
        {"mode": "follow"},
        {"distance": 0},
        {"distance": 7},
        {"insertional_policy": "ignore"},
    ])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            spec(**kw)

    def test_configurable_upper_bound(self):
        assert spec(distance=9, max_distance=10).distance == 9


class TestEnumerateItems:
    def test_ex5_shared_l2(self, en_ar):
        occ = enumerate_items(utt(en_ar, "ex5"), spec("shared-l2"), EN_AR)
        assert len(occ) == 12
        shared = [o for o in occ if o.is_shared]
        assert [(o.start, o.end) for o in shared] == [(5, 5)]
        assert sorted(o.start for o in occ if not o.is_shared) == [1, 2, 3, 4, 6, 7, 8, 9, 10, 11, 12]

    def test_ex5_shared_l1(self, en_ar):
        occ = enumerate_items(utt(en_ar, "ex5"), spec("shared-l1"), EN_AR)
        assert len(occ) == 12
        assert not any(o.is_shared for o in occ)
        assert ItemOccurrence("ex5", 5, 5, False, "ar") in occ

    def test_two_tokens(self, en_ar):
        u = utt(en_ar, "ex5")
        short = type(u)("s", "s", u.tokens[:2])
        assert enumerate_items(short, spec(), EN_AR) == []

    def test_items_touching_the_ends_are_dropped(self, en_ar):
        # "amr warda" ends the utterance
        occ = enumerate_items(utt(en_ar, "ex2"), spec("all-shared"), EN_AR)
        assert [(o.start, o.end, o.is_shared) for o in occ] == [(1, 1, False), (2, 2, False)]

    def test_multiword_counted_once(self, en_es):
        ny = utt(en_es, "nueva-york")
        occ = enumerate_items(ny, spec("all-shared"), EN_ES)
        assert [(o.start, o.end, o.is_shared) for o in occ] == [(1, 1, False), (2, 2, True), (3, 3, True)]

    def test_skip_neutral_items(self, en_es):
        u = utt(en_es, "ex6")
        with_neutral = enumerate_items(u, spec("shared-l1"), EN_ES)
        without = enumerate_items(u, spec("shared-l1", skip_neutral_items=True), EN_ES)
        assert len(with_neutral) - len(without) == 1  # the comma


class TestNearSwitch:
    point10 = [SwitchPoint("ex5", 10, "en", "ar", 0)]

    def test_ex5_window(self):
        item = ItemOccurrence("ex5", 5, 5, True, "ar")
        assert near_switch(item, self.point10, spec(direction="l1-l2", distance=5), EN_AR)
        assert not near_switch(item, self.point10, spec(direction="l1-l2", distance=4), EN_AR)

    def test_direction_filter(self):
        item = ItemOccurrence("ex5", 5, 5, True, "ar")
        assert not near_switch(item, self.point10, spec(direction="l2-l1", distance=6), EN_AR)
        assert near_switch(item, self.point10, spec(direction="both", distance=6), EN_AR)

    def test_empty_points(self):
        assert not near_switch(ItemOccurrence("u", 3, 3, True), [], spec(distance=6), EN_AR)

    def test_neighbor_looks_back(self):
        item = ItemOccurrence("u", 4, 4, True)
        pts = [SwitchPoint("u", 2, "en", "ar", 0)]
        assert near_switch(item, pts, spec(mode="neighbor", distance=2), EN_AR)
        assert not near_switch(item, pts, spec(mode="precede", distance=2), EN_AR)

    def test_distance_measured_from_item_boundaries(self):
        item = ItemOccurrence("u", 3, 5, True)
        after = [SwitchPoint("u", 6, "en", "ar", 0)]
        before = [SwitchPoint("u", 2, "en", "ar", 0)]
        assert near_switch(item, after, spec(distance=1), EN_AR)
        assert near_switch(item, before, spec(mode="neighbor", distance=1), EN_AR)


class TestBuildContingency:
    def test_empty(self):
        assert build_contingency(Corpus(EN_AR, ()), spec()) == ContingencyTable(0, 0, 0, 0)

    def test_ex5(self, en_ar):
        one = Corpus(EN_AR, (utt(en_ar, "ex5"),))
        assert build_contingency(one, spec("shared-l2", "l1-l2", "precede", 5)).as_tuple() == (1, 4, 0, 7)
        assert build_contingency(one, spec("shared-l2", "l1-l2", "precede", 4)).as_tuple() == (0, 4, 1, 7)

    @given(st.integers(0, 100_000), st.sampled_from(SHARED_TYPES), st.sampled_from(DIRECTIONS),
           st.sampled_from(MODES), st.integers(1, 6), st.sampled_from(["exclude-return", "keep-all"]),
           st.booleans())
    @settings(max_examples=150, deadline=None)
    def test_matches_pairwise_oracle(self, seed, shared_type, direction, mode, distance, policy, skip):
        c = random_corpus(seed, EN_ES, max_utterances=30)
        s = TestSpec(shared_type, direction, mode, distance, policy, skip_neutral_items=skip)
        assert build_contingency(c, s).as_tuple() == oracle_table(c, s)

    @given(st.integers(0, 100_000), st.sampled_from(SHARED_TYPES))
    @settings(max_examples=30, deadline=None)
    def test_count_invariants(self, seed, shared_type):
        c = random_corpus(seed, EN_ES, max_utterances=30)
        tables = {
            (dr, m, d): build_contingency(c, TestSpec(shared_type, dr, m, d))
            for dr in DIRECTIONS for m in MODES for d in range(1, 7)
        }
        margins = {(t.shared_total, t.nonshared_total) for t in tables.values()}
        assert len(margins) == 1
        for dr in DIRECTIONS:
            for m in MODES:
                a = [tables[(dr, m, d)].a for d in range(1, 7)]
                cc = [tables[(dr, m, d)].c for d in range(1, 7)]
                assert a == sorted(a) and cc == sorted(cc, reverse=True)
            for d in range(1, 7):
                assert tables[(dr, "neighbor", d)].a >= tables[(dr, "precede", d)].a
                assert tables[(dr, "neighbor", d)].b >= tables[(dr, "precede", d)].b
        for m in MODES:
            for d in range(1, 7):
                both = tables[("both", m, d)]
                one, two = tables[("l1-l2", m, d)], tables[("l2-l1", m, d)]
                assert max(one.a, two.a) <= both.a <= one.a + two.a

    def test_switch_counted_for_several_items(self, en_es):
        # both "scott" (2) and "kourtney" (6) precede "had" (8) within distance 6
        one = Corpus(EN_ES, (utt(en_es, "ex6"),))
        t = build_contingency(one, spec("shared-l1", "l2-l1", "precede", 6))
        assert t.a == 2


def test_table_dump_and_dict():
    t = ContingencyTable(216, 17515, 659, 143299)
    assert t.dump() == "216\t17515\t659\t143299"
    assert ContingencyTable.from_dict(t.to_dict()) == t
    assert t + ContingencyTable(1, 1, 1, 1) == ContingencyTable(217, 17516, 660, 143300)
    assert (t.shared_total, t.nonshared_total) == (875, 160814)


def test_points_used_are_filtered(en_ar):
    # ex7: the return switch (pos 3) is excluded, so "fi" at 3 is no switch point
    u = utt(en_ar, "ex7")
    assert [p.position for p in utterance_switches(u, EN_AR)] == [2]
