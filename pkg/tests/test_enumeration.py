import itertools
import math
import os
import struct
import tempfile
from fractions import Fraction

import numpy as np
import pytest

import facetgauge.closedforms as cf
import facetgauge.enumeration as en
from facetgauge.geometry import Hyperplane, ResourceGuardError, hull_distance


def decode(indexer, mask):
    return [indexer.edge_at(i) for i in range(indexer.m) if mask >> i & 1]


def connected(n, edges):
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        vs = list(e)
        for v in vs[1:]:
            ra, rb = find(vs[0]), find(v)
            if ra != rb:
                parent[rb] = ra
    return len({find(v) for v in range(1, n + 1)}) == 1


def det_int(mat):
    """Exact integer determinant (Bareiss elimination)."""
    a = [row[:] for row in mat]
    size = len(a)
    sign = 1
    prev = 1
    for i in range(size - 1):
        if a[i][i] == 0:
            for j in range(i + 1, size):
                if a[j][i] != 0:
                    a[i], a[j] = a[j], a[i]
                    sign = -sign
                    break
            else:
                return 0
        for j in range(i + 1, size):
            for k in range(i + 1, size):
                a[j][k] = (a[j][k] * a[i][i] - a[j][i] * a[i][k]) // prev
        prev = a[i][i]
    return sign * a[-1][-1]


def weighted_tree_polynomial(n, k):
    """Coefficients of sum_T w^(edges of T inside {1..k}), via the
    weighted matrix-tree theorem evaluated at integers and Lagrange
    interpolation.  Degree is at most k-1 because tree edges inside S
    form a forest on S."""
    s = set(range(1, k + 1))
    xs = list(range(k))
    ys = []
    for w in xs:
        lap = [[0] * n for _ in range(n)]
        for u in range(1, n + 1):
            for v in range(u + 1, n + 1):
                wt = w if (u in s and v in s) else 1
                lap[u - 1][u - 1] += wt
                lap[v - 1][v - 1] += wt
                lap[u - 1][v - 1] -= wt
                lap[v - 1][u - 1] -= wt
        red = [row[:-1] for row in lap[:-1]]
        ys.append(det_int(red))
    coeffs = [Fraction(0)] * k
    for i, xi in enumerate(xs):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            new = [Fraction(0)] * (len(basis) + 1)
            for d, c in enumerate(basis):
                new[d] -= c * xj
                new[d + 1] += c
            basis = new
            denom *= xi - xj
        for d, c in enumerate(basis):
            coeffs[d] += c * ys[i] / denom
    out = []
    for c in coeffs:
        assert c.denominator == 1
        out.append(int(c))
    return out


class TestEdgeIndexer:
    def test_tsp_pairs_lex(self):
        ix = en.EdgeIndexer("TSP", 4)
        assert ix.edges == ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
        assert ix.m == 6

    def test_sthgp_size_then_lex(self):
        ix = en.EdgeIndexer("STHGP", 3)
        assert ix.edges == ((1, 2), (1, 3), (2, 3), (1, 2, 3))

    def test_sthgp_m(self):
        for n in range(2, 9):
            assert en.EdgeIndexer("STHGP", n).m == 2 ** n - n - 1

    def test_index_roundtrip(self):
        ix = en.EdgeIndexer("STHGP", 5)
        for i in range(ix.m):
            assert ix.index_of(ix.edge_at(i)) == i

    def test_index_of_unsorted(self):
        ix = en.EdgeIndexer("TSP", 5)
        assert ix.index_of((4, 2)) == ix.index_of((2, 4))
        ix = en.EdgeIndexer("STHGP", 4)
        assert ix.index_of([3, 1, 2]) == ix.index_of((1, 2, 3))

    def test_index_of_missing(self):
        ix = en.EdgeIndexer("TSP", 4)
        with pytest.raises(KeyError):
            ix.index_of((1, 5))

    def test_edge_sizes(self):
        sizes = en.EdgeIndexer("STHGP", 4).edge_sizes()
        assert list(sizes) == [2] * 6 + [3] * 4 + [4]

    def test_rejects(self):
        with pytest.raises(ValueError):
            en.EdgeIndexer("QAP", 5)
        with pytest.raises(ValueError):
            en.EdgeIndexer("TSP", 1)


class TestCounts:
    def test_tsp(self):
        for n in range(3, 10):
            assert en.count_extreme_points("TSP", n) == \
                math.factorial(n - 1) // 2

    def test_stgp(self):
        for n in range(2, 9):
            assert en.count_extreme_points("STGP", n) == n ** (n - 2)

    def test_sthgp(self):
        for n in range(2, 8):
            assert en.count_extreme_points("STHGP", n) == cf.sthgp_tree_count(n)

    def test_no_duplicates(self):
        for family, n in [("TSP", 7), ("STGP", 6), ("STHGP", 5)]:
            pts = en.enumerate_extreme_points(family, n)
            assert len(set(pts.points)) == len(pts)

    def test_stream_matches_materialized(self):
        for family, n in [("TSP", 6), ("STGP", 5), ("STHGP", 4)]:
            streamed = list(en.iter_extreme_points(family, n))
            assert streamed == en.enumerate_extreme_points(family, n).points

    def test_visitor(self):
        seen = []
        en.visit_extreme_points("STGP", 4, seen.append)
        assert seen == en.enumerate_extreme_points("STGP", 4).points

    @pytest.mark.slow
    def test_tsp_large(self):
        assert en.count_extreme_points("TSP", 11) == math.factorial(10) // 2
        assert en.count_extreme_points("TSP", 12) == math.factorial(11) // 2

    @pytest.mark.slow
    def test_stgp_large(self):
        assert en.count_extreme_points("STGP", 9) == 9 ** 7

    @pytest.mark.slow
    def test_sthgp_large(self):
        assert en.count_extreme_points("STHGP", 8) == cf.sthgp_tree_count(8)

    @pytest.mark.slow
    def test_sthgp_n9(self):
        assert en.count_extreme_points("STHGP", 9) == cf.sthgp_tree_count(9)


class TestPointValidity:
    def test_tours_are_hamiltonian_cycles(self):
        for n in range(3, 8):
            pts = en.enumerate_extreme_points("TSP", n)
            for mask in pts:
                edges = decode(pts.indexer, mask)
                assert len(edges) == n
                degree = [0] * (n + 1)
                for (u, v) in edges:
                    degree[u] += 1
                    degree[v] += 1
                assert all(d == 2 for d in degree[1:])
                assert connected(n, edges)

    def test_stgp_points_are_trees(self):
        for n in range(2, 8):
            pts = en.enumerate_extreme_points("STGP", n)
            for mask in pts:
                edges = decode(pts.indexer, mask)
                assert len(edges) == n - 1
                assert connected(n, edges)

    def test_sthgp_points_are_hypertrees(self):
        for n in range(2, 7):
            pts = en.enumerate_extreme_points("STHGP", n)
            for mask in pts:
                edges = decode(pts.indexer, mask)
                assert sum(len(e) - 1 for e in edges) == n - 1
                assert connected(n, edges)


class TestSthgpSubsetOracle:
    """Independent route: filter all small edge subsets for the
    hypertree characterization (material plus connected)."""

    def brute(self, n):
        ix = en.EdgeIndexer("STHGP", n)
        found = set()
        for r in range(1, n):
            for combo in itertools.combinations(range(ix.m), r):
                edges = [ix.edge_at(i) for i in combo]
                if sum(len(e) - 1 for e in edges) != n - 1:
                    continue
                if not connected(n, edges):
                    continue
                mask = 0
                for i in combo:
                    mask |= 1 << i
                found.add(mask)
        return found

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_matches_generator(self, n):
        generated = set(en.enumerate_extreme_points("STHGP", n).points)
        assert generated == self.brute(n)


class TestStgpMatrixTreeOracle:
    def test_total_counts(self):
        for n in range(2, 9):
            lap = [[n - 1 if i == j else -1 for j in range(n - 1)]
                   for i in range(n - 1)]
            assert en.count_extreme_points("STGP", n) == det_int(lap)

    @pytest.mark.parametrize("n,k", [(5, 2), (5, 3), (6, 3), (7, 4)])
    def test_tight_counts(self, n, k):
        poly = weighted_tree_polynomial(n, k)
        pts = en.enumerate_extreme_points("STGP", n)
        h = en.build_facet(pts.indexer, cf.StgpSubtour(n=n, k=k))
        assert en.count_incident(pts, h) == poly[k - 1]
        assert sum(poly) == len(pts)


class TestCentroids:
    def test_tsp(self):
        for n in range(4, 8):
            c = en.enumerate_extreme_points("TSP", n).centroid()
            assert set(c) == {cf.tsp_centroid_value(n)}

    def test_stgp(self):
        for n in range(3, 8):
            c = en.enumerate_extreme_points("STGP", n).centroid()
            assert set(c) == {cf.stgp_centroid_value(n)}

    def test_sthgp(self):
        for n in range(2, 8):
            pts = en.enumerate_extreme_points("STHGP", n)
            c = pts.centroid()
            for i, e in enumerate(pts.indexer.edges):
                assert c[i] == cf.sthgp_centroid_value(n, len(e))

    def test_empty_set_raises(self):
        empty = en.ExtremePointSet(en.EdgeIndexer("TSP", 4), [])
        with pytest.raises(ValueError):
            empty.centroid()


class TestBuildFacet:
    def test_sthgp_subtour_example(self):
        ix = en.EdgeIndexer("STHGP", 3)
        h = en.build_facet(ix, cf.SthgpSubtour(n=3, k=2))
        assert h.a == (1, 0, 0, 1)
        assert h.b == 1 and h.sense == "<="

    def test_sthgp_hull_example(self):
        ix = en.EdgeIndexer("STHGP", 3)
        h = en.build_facet(ix, cf.AffineHull(n=3))
        assert h.a == (1, 1, 1, 2)
        assert h.b == 2 and h.sense == "=="

    def test_tsp_subtour_crossing(self):
        ix = en.EdgeIndexer("TSP", 5)
        h = en.build_facet(ix, cf.TspSubtour(n=5, k=2))
        assert h.b == 2 and h.sense == ">="
        for (u, v) in ix.edges:
            expect = 1 if (u <= 2) != (v <= 2) else 0
            assert h.a[ix.index_of((u, v))] == expect

    def test_nonneg_units(self):
        ix = en.EdgeIndexer("TSP", 6)
        h = en.build_facet(ix, cf.TspNonNeg(n=6))
        assert sum(h.a) == 1 and h.a[ix.index_of((1, 2))] == 1
        assert h.b == 0 and h.sense == ">="
        ix = en.EdgeIndexer("STHGP", 5)
        h = en.build_facet(ix, cf.SthgpNonNeg(n=5, k=3))
        assert sum(h.a) == 1 and h.a[ix.index_of((1, 2, 3))] == 1

    def test_stgp_subtour(self):
        ix = en.EdgeIndexer("STGP", 6)
        h = en.build_facet(ix, cf.StgpSubtour(n=6, k=3))
        inside = [(1, 2), (1, 3), (2, 3)]
        assert sum(h.a) == 3 and h.b == 2 and h.sense == "<="
        for e in inside:
            assert h.a[ix.index_of(e)] == 1

    def test_sthgp_subtour_coefficients(self):
        ix = en.EdgeIndexer("STHGP", 5)
        h = en.build_facet(ix, cf.SthgpSubtour(n=5, k=3))
        s = {1, 2, 3}
        for i, e in enumerate(ix.edges):
            assert h.a[i] == max(len(s.intersection(e)) - 1, 0)

    def test_tsp_hull_is_degree_equations(self):
        ix = en.EdgeIndexer("TSP", 5)
        with pytest.raises(ValueError):
            en.build_facet(ix, cf.AffineHull(n=5))
        eqs = en.affine_hull_equations(ix)
        assert len(eqs) == 5
        for v, h in enumerate(eqs, start=1):
            assert h.b == 2 and h.sense == "=="
            assert sum(h.a) == 4
            for i, e in enumerate(ix.edges):
                assert h.a[i] == (1 if v in e else 0)

    def test_tree_hulls_single_equation(self):
        for family in ("STGP", "STHGP"):
            ix = en.EdgeIndexer(family, 5)
            eqs = en.affine_hull_equations(ix)
            assert len(eqs) == 1
            assert eqs[0].sense == "=="
            assert eqs[0].b == 4

    def test_mismatches(self):
        ix = en.EdgeIndexer("TSP", 5)
        with pytest.raises(ValueError):
            en.build_facet(ix, cf.TspSubtour(n=6, k=2))
        with pytest.raises(ValueError):
            en.build_facet(ix, cf.StgpSubtour(n=5, k=2))
        with pytest.raises(ValueError):
            en.build_facet(ix, "not a spec")


class TestComb:
    def test_vertex_classes_consecutive(self):
        spec = cf.TspComb3(n=10, b1=1, t1=2, b2=1, t2=1, b3=2, t3=1, h=1, o=1)
        handle, t1, t2, t3 = en.comb_vertex_classes(spec)
        assert t1 == {1, 2, 3}
        assert t2 == {4, 5}
        assert t3 == {6, 7, 8}
        assert handle == {1, 4, 6, 7, 9}
        assert (handle | t1 | t2 | t3 | {10}) == set(range(1, 11))

    def test_unit_comb_facet(self):
        spec = cf.TspComb3(n=6, b1=1, t1=1, b2=1, t2=1, b3=1, t3=1)
        ix = en.EdgeIndexer("TSP", 6)
        h = en.build_facet(ix, spec)
        assert h.b == 4 and h.sense == "<="
        ones = {(1, 2), (3, 4), (5, 6), (1, 3), (1, 5), (3, 5)}
        for i, e in enumerate(ix.edges):
            assert h.a[i] == (1 if e in ones else 0)

    def test_unit_comb_weak_cd_vs_projection(self):
        spec = cf.TspComb3(n=6, b1=1, t1=1, b2=1, t2=1, b3=1, t3=1)
        pts = en.enumerate_extreme_points("TSP", 6)
        h = en.build_facet(pts.indexer, spec)
        inc = en.incident_points(pts, h)
        assert len(inc) > 0
        centroid = [float(x) for x in pts.centroid()]
        r = hull_distance(inc.float_chunks(), centroid, bounds=False)
        assert r.distance_squared == pytest.approx(float(Fraction(128, 105)),
                                                   abs=1e-9)
        assert float(cf.tsp_comb3_cd2(spec)) == pytest.approx(
            r.distance_squared, abs=1e-9)


class TestIncidence:
    def test_spec_examples(self):
        pts = en.enumerate_extreme_points("TSP", 5)
        h = en.build_facet(pts.indexer, cf.TspSubtour(n=5, k=2))
        assert len(pts) == 12 and en.count_incident(pts, h) == 6
        pts = en.enumerate_extreme_points("STHGP", 3)
        h = en.build_facet(pts.indexer, cf.SthgpSubtour(n=3, k=2))
        assert len(pts) == 4 and en.count_incident(pts, h) == 3
        pts = en.enumerate_extreme_points("STGP", 4)
        h = en.build_facet(pts.indexer, cf.StgpSubtour(n=4, k=2))
        assert len(pts) == 16 and en.count_incident(pts, h) == 8

    def test_tsp_nonneg_complement(self):
        for n in range(4, 9):
            pts = en.enumerate_extreme_points("TSP", n)
            h = en.build_facet(pts.indexer, cf.TspNonNeg(n=n))
            assert en.count_incident(pts, h) == \
                len(pts) - math.factorial(n - 2)

    def test_epr_spots(self):
        pts = en.enumerate_extreme_points("STHGP", 5)
        for k in range(2, 6):
            h = en.build_facet(pts.indexer, cf.SthgpNonNeg(n=5, k=k))
            assert Fraction(en.count_incident(pts, h), len(pts)) == \
                cf.sthgp_nonneg_epr(5, k)
        for k in range(2, 5):
            h = en.build_facet(pts.indexer, cf.SthgpSubtour(n=5, k=k))
            assert Fraction(en.count_incident(pts, h), len(pts)) == \
                cf.sthgp_subtour_epr(5, k)
        pts = en.enumerate_extreme_points("TSP", 7)
        for k in range(2, 6):
            h = en.build_facet(pts.indexer, cf.TspSubtour(n=7, k=k))
            assert Fraction(en.count_incident(pts, h), len(pts)) == \
                cf.tsp_subtour_epr(7, k)

    def test_affine_hull_holds_everywhere(self):
        for family, n in [("TSP", 6), ("STGP", 6), ("STHGP", 5)]:
            pts = en.enumerate_extreme_points(family, n)
            for eq in en.affine_hull_equations(pts.indexer):
                assert en.count_incident(pts, eq) == len(pts)

    def test_facets_are_valid_inequalities(self):
        pts = en.enumerate_extreme_points("TSP", 6)
        specs = [cf.TspNonNeg(n=6), cf.TspSubtour(n=6, k=3),
                 cf.TspComb3(n=6, b1=1, t1=1, b2=1, t2=1, b3=1, t3=1)]
        hyps = [en.build_facet(pts.indexer, s) for s in specs]
        assert en.satisfy_all(pts, hyps)
        pts = en.enumerate_extreme_points("STHGP", 5)
        hyps = [en.build_facet(pts.indexer, cf.SthgpSubtour(n=5, k=k))
                for k in range(2, 5)]
        hyps += [en.build_facet(pts.indexer, cf.SthgpNonNeg(n=5, k=k))
                 for k in range(2, 6)]
        assert en.satisfy_all(pts, hyps)
        pts = en.enumerate_extreme_points("STGP", 6)
        hyps = [en.build_facet(pts.indexer, cf.StgpSubtour(n=6, k=k))
                for k in range(2, 6)]
        assert en.satisfy_all(pts, hyps)

    def test_relabeled_subset_same_count(self):
        # canonical S = {1..k} is representative: any same-size subset
        # gives the same tight count
        pts = en.enumerate_extreme_points("STHGP", 6)
        ix = pts.indexer
        h_canon = en.build_facet(ix, cf.SthgpSubtour(n=6, k=3))
        s = {2, 4, 6}
        a = tuple(max(len(s.intersection(e)) - 1, 0) for e in ix.edges)
        h_other = Hyperplane(a, 2, "<=")
        assert en.count_incident(pts, h_canon) == en.count_incident(pts, h_other)

        pts = en.enumerate_extreme_points("TSP", 7)
        ix = pts.indexer
        h_canon = en.build_facet(ix, cf.TspSubtour(n=7, k=3))
        s = {1, 4, 6}
        a = tuple(1 if (u in s) != (v in s) else 0 for (u, v) in ix.edges)
        h_other = Hyperplane(a, 2, ">=")
        assert en.count_incident(pts, h_canon) == en.count_incident(pts, h_other)

    def test_incident_points_subset(self):
        pts = en.enumerate_extreme_points("STGP", 5)
        h = en.build_facet(pts.indexer, cf.StgpSubtour(n=5, k=2))
        inc = en.incident_points(pts, h)
        assert len(inc) == en.count_incident(pts, h)
        assert all(h.evaluate_bits(p) == h.b for p in inc)
        assert inc.indexer is pts.indexer

    def test_dimension_mismatch(self):
        pts = en.enumerate_extreme_points("TSP", 5)
        with pytest.raises(ValueError):
            en.count_incident(pts, Hyperplane((1, 0), 0, ">="))


class TestSurvey:
    def test_matches_materialized(self):
        pts = en.enumerate_extreme_points("STHGP", 5)
        hyps = [en.build_facet(pts.indexer, cf.SthgpSubtour(n=5, k=3)),
                en.build_facet(pts.indexer, cf.SthgpNonNeg(n=5, k=2))]
        sv = en.survey("STHGP", 5, hyps)
        assert sv.count == len(pts)
        assert sv.tight_counts == [en.count_incident(pts, h) for h in hyps]
        sums = [sum(p >> i & 1 for p in pts) for i in range(pts.indexer.m)]
        assert list(sv.coordinate_sums) == sums

    def test_small_chunk(self):
        sv = en.survey("TSP", 6, chunk=7)
        assert sv.count == 60

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            en.survey("TSP", 5, [Hyperplane((1,), 0, ">=")])


class TestGuards:
    def test_over_max(self):
        with pytest.raises(ResourceGuardError):
            en.count_extreme_points("TSP", 13)
        with pytest.raises(ResourceGuardError):
            en.enumerate_extreme_points("STHGP", 10)
        with pytest.raises(ResourceGuardError):
            en.survey("STGP", 10)

    def test_under_min(self):
        with pytest.raises(ValueError):
            en.count_extreme_points("TSP", 2)
        with pytest.raises(ValueError):
            en.count_extreme_points("STGP", 1)

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            en.count_extreme_points("QAP", 5)

    def test_accept_cost_overrides(self, monkeypatch):
        monkeypatch.setitem(en.GUARD_MAX, "TSP", 4)
        with pytest.raises(ResourceGuardError):
            en.count_extreme_points("TSP", 5)
        assert en.count_extreme_points("TSP", 5, accept_cost=True) == 12


class TestDumpLoad:
    def test_binary_roundtrip(self):
        for family, n in [("TSP", 6), ("STGP", 5), ("STHGP", 4)]:
            pts = en.enumerate_extreme_points(family, n)
            with tempfile.TemporaryDirectory() as d:
                path = os.path.join(d, "pts.bin")
                en.dump_points(pts, path)
                back = en.load_points(path)
            assert back.indexer.family == family
            assert back.indexer.n == n
            assert back.points == pts.points

    def test_text_format(self):
        pts = en.enumerate_extreme_points("STHGP", 3)
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, "pts.txt")
            en.dump_points(pts, path, fmt="text")
            lines = open(path).read().splitlines()
        assert len(lines) == 4
        assert sorted(lines) == sorted(
            ["1100", "1010", "0110", "0001"])

    def test_bad_magic(self):
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, "bad.bin")
            with open(path, "wb") as fh:
                fh.write(b"NOPE" + b"\x00" * 16)
            with pytest.raises(ValueError, match="magic"):
                en.load_points(path)

    def test_truncated(self):
        pts = en.enumerate_extreme_points("TSP", 5)
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, "pts.bin")
            en.dump_points(pts, path)
            data = open(path, "rb").read()
            with open(path, "wb") as fh:
                fh.write(data[:-3])
            with pytest.raises(ValueError, match="truncated"):
                en.load_points(path)

    def test_bad_version(self):
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, "v9.bin")
            with open(path, "wb") as fh:
                fh.write(en._MAGIC)
                fh.write(struct.pack("<BBHIQ", 9, 1, 5, 10, 0))
            with pytest.raises(ValueError, match="version"):
                en.load_points(path)

    def test_bad_fmt(self):
        pts = en.enumerate_extreme_points("TSP", 5)
        with pytest.raises(ValueError):
            en.dump_points(pts, "/tmp/x", fmt="yaml")


class TestBitPacking:
    def test_bits_to_array(self):
        arr = en._bits_to_array([0b1011, 0b0100], 4)
        assert arr.tolist() == [[1, 1, 0, 1], [0, 0, 1, 0]]

    def test_wide_rows(self):
        # m past one byte exercises the little-endian packing
        mask = (1 << 0) | (1 << 9) | (1 << 14)
        arr = en._bits_to_array([mask], 15)
        assert arr.sum() == 3
        assert arr[0, 0] == 1 and arr[0, 9] == 1 and arr[0, 14] == 1

    def test_float_chunks_restartable(self):
        pts = en.enumerate_extreme_points("TSP", 5)
        chunks = pts.float_chunks(chunk=5)
        total1 = sum(c.shape[0] for c in chunks())
        total2 = sum(c.shape[0] for c in chunks())
        assert total1 == total2 == 12
