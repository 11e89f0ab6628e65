from fractions import Fraction

import numpy as np
import pytest

import facetgauge.analysis as an
import facetgauge.closedforms as cf
from facetgauge.exactnum import LogScalar, RootExpr


class TestSubtourRange:
    def test_ranges(self):
        assert list(an.subtour_range("TSP", 6)) == [2, 3, 4]
        assert list(an.subtour_range("STGP", 6)) == [2, 3, 4, 5]
        assert list(an.subtour_range("STHGP", 6)) == [2, 3, 4, 5]

    def test_empty(self):
        with pytest.raises(ValueError):
            an.subtour_range("TSP", 3)
        with pytest.raises(ValueError):
            an.subtour_range("STHGP", 2)
        with pytest.raises(ValueError):
            an.subtour_range("QAP", 10)


class TestSubtourValue:
    @pytest.mark.parametrize("family,n", [("TSP", 9), ("STGP", 8),
                                          ("STHGP", 8)])
    def test_cd_squares_to_cd2(self, family, n):
        for k in an.subtour_range(family, n):
            cd = an.subtour_value(family, n, k, "CD")
            cd2 = an.subtour_value(family, n, k, "CD2")
            assert isinstance(cd, RootExpr)
            assert cd.squared() == cd2

    def test_known_values(self):
        assert an.subtour_value("TSP", 5, 2, "EPR") == Fraction(1, 2)
        assert an.subtour_value("TSP", 5, 2, "CD2") == Fraction(1, 2)
        assert an.subtour_value("STHGP", 3, 2, "EPR") == Fraction(3, 4)
        assert an.subtour_value("STGP", 6, 3, "CD2") == Fraction(5, 12)

    def test_measure_case_insensitive(self):
        assert an.subtour_value("TSP", 6, 2, "epr") == \
            an.subtour_value("TSP", 6, 2, "EPR")

    def test_bad_measure(self):
        with pytest.raises(ValueError):
            an.subtour_value("TSP", 6, 2, "volume")


class TestSweep:
    def test_sthgp_10_epr(self):
        r = an.sweep("STHGP", 10, "EPR")
        assert r.mode == "exact"
        assert r.ks() == list(range(2, 10))
        vals = {k: v for k, v, _ in r.rows}
        assert max(vals, key=vals.get) == 9

    def test_tsp_10_cd2_symmetric(self):
        r = an.sweep("TSP", 10, "CD2")
        vals = {k: v for k, v, _ in r.rows}
        for k in vals:
            assert vals[k] == vals[10 - k]

    def test_stgp_100_cd2_unimodal(self):
        fl = an.sweep("STGP", 100, "CD2").floats()
        peak = fl.index(max(fl))
        assert all(a < b for a, b in zip(fl[:peak], fl[1:peak + 1]))
        assert all(a > b for a, b in zip(fl[peak:], fl[peak + 1:]))

    def test_rows_ascending_complete(self):
        for family, n in [("TSP", 12), ("STGP", 9), ("STHGP", 9)]:
            r = an.sweep(family, n, "CD2")
            assert r.ks() == list(an.subtour_range(family, n))

    def test_row_for(self):
        r = an.sweep("TSP", 8, "EPR")
        assert r.row_for(3)[0] == 3
        with pytest.raises(KeyError):
            r.row_for(99)

    def test_mode_switch(self):
        assert an.sweep("STHGP", 200, "EPR").mode == "exact"
        assert an.sweep("STHGP", 201, "EPR").mode == "log"
        assert an.sweep("STHGP", 30, "EPR", threshold=10).mode == "log"

    def test_log_rows_are_logscalars(self):
        r = an.sweep("STHGP", 30, "CD", threshold=10)
        for k, v, f in r.rows:
            assert isinstance(v, LogScalar)
            assert f == pytest.approx(v.to_float())

    @pytest.mark.parametrize("family", ["TSP", "STGP", "STHGP"])
    @pytest.mark.parametrize("measure", ["EPR", "CD2", "CD"])
    def test_log_matches_exact(self, family, measure):
        n = 40
        log = an.sweep(family, n, measure, threshold=10)
        exact = an.sweep(family, n, measure)
        assert log.mode == "log" and exact.mode == "exact"
        for (k1, _, f1), (k2, _, f2) in zip(log.rows, exact.rows):
            assert k1 == k2
            assert f1 == pytest.approx(f2, rel=1e-9)

    def test_threads_deterministic(self):
        a = an.sweep("STHGP", 25, "CD2", threads=4)
        b = an.sweep("STHGP", 25, "CD2", threads=1)
        assert a.rows == b.rows

    def test_threads_env(self, monkeypatch):
        monkeypatch.setenv("FACETGAUGE_THREADS", "3")
        assert an._resolve_threads(None) == 3
        monkeypatch.delenv("FACETGAUGE_THREADS")
        assert an._resolve_threads(None) == 1
        with pytest.raises(ValueError):
            an._resolve_threads(0)

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            an.sweep("TSP", 3, "EPR")
        with pytest.raises(ValueError):
            an.sweep("TSP", 10, "volume")


class TestWeakestSubtour:
    def test_table_rows_small(self):
        assert an.weakest_subtour("STHGP", 10, "EPR") == 4
        assert an.weakest_subtour("STHGP", 10, "CD") == 5
        assert an.weakest_subtour("STHGP", 100, "EPR") == 35
        assert an.weakest_subtour("STHGP", 100, "CD") == 45

    def test_cd2_orders_like_cd(self):
        for n in (10, 100):
            assert an.weakest_subtour("STHGP", n, "CD2") == \
                an.weakest_subtour("STHGP", n, "CD")

    def test_epr_before_cd(self):
        for n in (10, 100):
            assert an.weakest_subtour("STHGP", n, "EPR") <= \
                an.weakest_subtour("STHGP", n, "CD")

    def test_log_agrees_with_exact(self):
        for measure in ("EPR", "CD"):
            k_log = an.weakest_subtour("STHGP", 100, measure, threshold=10)
            k_exact = an.weakest_subtour("STHGP", 100, measure)
            assert k_log == k_exact

    def test_exact_window_settles_log_run(self):
        k = an.weakest_subtour("STHGP", 100, "EPR", threshold=10,
                               exact_window=3)
        assert k == 35

    def test_log_tie_flagged(self, monkeypatch):
        monkeypatch.setattr(an, "LOG_TIE_RTOL", 1e6)
        with pytest.warns(UserWarning, match="tie"):
            k = an.weakest_subtour("STHGP", 20, "EPR", threshold=10)
        assert k == 2  # everything tied, smallest k reported

    def test_rejects(self):
        with pytest.raises(ValueError):
            an.weakest_subtour("TSP", 10, "EPR")
        with pytest.raises(ValueError):
            an.weakest_subtour("STHGP", 3, "EPR")

    @pytest.mark.slow
    def test_table_row_1000_log(self):
        assert an.weakest_subtour("STHGP", 1000, "EPR") == 342
        assert an.weakest_subtour("STHGP", 1000, "CD") == 434


class TestDisagreementMatrix:
    def test_n10(self):
        m = an.disagreement_matrix(10)
        assert m.cell(4, 5) == "disagree"
        assert m.disagreeing_pairs() == [(4, 5)]

    def test_symmetry_and_diagonal(self):
        for n in (10, 25, 40, 60):
            m = an.disagreement_matrix(n)
            assert (m.disagree == m.disagree.T).all()
            assert not m.disagree.diagonal().any()

    def test_agreement_dominates(self):
        for n in (10, 20, 40):
            m = an.disagreement_matrix(n)
            assert m.fraction_disagreeing() < 0.25

    def test_disagreement_straddles_weakest(self):
        # disagreeing pairs compare one k from each flank of the weak
        # trough; two strong subtours are never ranked oppositely
        m = an.disagreement_matrix(40)
        pairs = m.disagreeing_pairs()
        assert pairs
        lo = an.weakest_subtour("STHGP", 40, "EPR")
        hi = an.weakest_subtour("STHGP", 40, "CD")
        for k1, k2 in pairs:
            assert k1 <= hi and k2 >= lo

    def test_log_mode_matches_exact(self):
        exact = an.disagreement_matrix(30)
        log = an.disagreement_matrix(30, threshold=10)
        assert (exact.disagree == log.disagree).all()

    def test_rejects(self):
        with pytest.raises(ValueError):
            an.disagreement_matrix(3)


class TestReflectCompare:
    def test_epr_dominance(self):
        rows = an.reflect_compare(10, "EPR")
        assert [r[0] for r in rows] == [2, 3, 4, 5]
        assert all(r[2] >= r[1] for r in rows)

    def test_cd_dominance(self):
        rows = an.reflect_compare(10, "CD")
        assert all(r[2] <= r[1] for r in rows)

    def test_midpoint_identical(self):
        rows = an.reflect_compare(12, "EPR")
        assert rows[-1][0] == 6
        assert rows[-1][1] == rows[-1][2]

    def test_odd_n(self):
        rows = an.reflect_compare(11, "EPR")
        assert [r[0] for r in rows] == [2, 3, 4, 5]
        assert all(r[1] != r[2] for r in rows)

    def test_values_are_exact(self):
        for k, v1, v2 in an.reflect_compare(9, "CD2"):
            assert isinstance(v1, Fraction) and isinstance(v2, Fraction)
            assert v1 == cf.sthgp_subtour_cd(9, k).squared()
            assert v2 == cf.sthgp_subtour_cd(9, 9 - k).squared()

    def test_rejects(self):
        with pytest.raises(ValueError):
            an.reflect_compare(4, "EPR")
