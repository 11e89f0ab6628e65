"""Brute-force enumeration of polytope extreme points.

Tours of TSP(n), spanning trees of STGP(n) and spanning hypertrees of
STHGP(n) are generated exhaustively as 0/1 incidence vectors, packed
into Python ints (bit i = coordinate i of the edge indexer).  Exact
centroids and incidence counts against hyperplanes make this the
independent oracle that every closed form is tested against.

Enumeration cost explodes quickly, so the entry points guard their n
range and only proceed past it when the caller passes accept_cost=True.
"""

from __future__ import annotations

import itertools
import struct
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .closedforms import (
    AffineHull,
    FacetSpec,
    SthgpNonNeg,
    SthgpSubtour,
    StgpSubtour,
    TspComb3,
    TspNonNeg,
    TspSubtour,
)
from .geometry import Hyperplane, ResourceGuardError

FAMILIES = ("TSP", "STGP", "STHGP")

# Guard rails: largest n enumerated without an explicit cost opt-in.
GUARD_MAX = {"TSP": 12, "STGP": 9, "STHGP": 9}
GUARD_MIN = {"TSP": 3, "STGP": 2, "STHGP": 2}


class EdgeIndexer:
    """Stable bijection between coordinates and edges of one family.

    TSP and STGP use the C(n,2) vertex pairs in lexicographic order;
    STHGP uses all 2^n - n - 1 vertex subsets of size >= 2, ordered by
    (size, lexicographic).  Vertices are 1-based, coordinates 0-based.
    """

    def __init__(self, family, n):
        if family not in FAMILIES:
            raise ValueError("unknown family %r" % (family,))
        if n < 2:
            raise ValueError("needs n >= 2")
        self.family = family
        self.n = n
        if family == "STHGP":
            edges = []
            for size in range(2, n + 1):
                edges.extend(itertools.combinations(range(1, n + 1), size))
        else:
            edges = list(itertools.combinations(range(1, n + 1), 2))
        self.edges = tuple(edges)
        self._index = {e: i for i, e in enumerate(self.edges)}

    @property
    def m(self):
        return len(self.edges)

    def index_of(self, edge):
        """Coordinate of a vertex pair / vertex subset (any iterable)."""
        key = tuple(sorted(edge))
        try:
            return self._index[key]
        except KeyError:
            raise KeyError("no edge %r in %s(%d)" % (key, self.family, self.n))

    def edge_at(self, i):
        return self.edges[i]

    def edge_sizes(self):
        return np.array([len(e) for e in self.edges])

    def __repr__(self):
        return "EdgeIndexer(%s, n=%d, m=%d)" % (self.family, self.n, self.m)


@dataclass
class ExtremePointSet:
    """A fully materialized extreme point set of one polytope."""

    indexer: EdgeIndexer
    points: list = field(default_factory=list)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def centroid(self):
        """Exact component-wise average of the points."""
        if not self.points:
            raise ValueError("centroid of an empty point set")
        sums = _coordinate_sums(self.points, self.indexer.m)
        count = len(self.points)
        return tuple(Fraction(int(s), count) for s in sums)

    def float_chunks(self, chunk=16384):
        """Zero-argument callable yielding float chunks, as consumed by
        geometry.hull_distance."""
        points, m = self.points, self.indexer.m

        def passes():
            for start in range(0, len(points), chunk):
                yield _bits_to_array(points[start:start + chunk], m).astype(float)

        return passes

    def subset(self, keep):
        return ExtremePointSet(self.indexer, [self.points[i] for i in keep])


def _bits_to_array(points, m):
    """Unpack a list of coordinate bitmasks into a 0/1 uint8 matrix."""
    nbytes = (m + 7) // 8
    buf = b"".join(p.to_bytes(nbytes, "little") for p in points)
    raw = np.frombuffer(buf, dtype=np.uint8).reshape(len(points), nbytes)
    return np.unpackbits(raw, axis=1, bitorder="little")[:, :m]


def _coordinate_sums(points, m):
    sums = np.zeros(m, dtype=np.int64)
    for start in range(0, len(points), 65536):
        sums += _bits_to_array(points[start:start + 65536], m).sum(
            axis=0, dtype=np.int64)
    return sums


def _check_guard(family, n, accept_cost):
    if family not in FAMILIES:
        raise ValueError("unknown family %r" % (family,))
    if n < GUARD_MIN[family]:
        raise ValueError("%s needs n >= %d" % (family, GUARD_MIN[family]))
    if n > GUARD_MAX[family] and not accept_cost:
        raise ResourceGuardError(
            "%s(%d) enumeration is over the n <= %d guard; "
            "pass accept_cost=True to run it anyway"
            % (family, n, GUARD_MAX[family]))


# ---------------------------------------------------------------------------
# Generators.  Each yields coordinate bitmasks, complete and
# duplicate-free by construction.


def iter_tsp_tours(n, indexer=None):
    """All (n-1)!/2 undirected tours of K_n.

    Vertex 1 is fixed as the start and the direction is canonicalized
    by requiring the second vertex to be smaller than the last.
    """
    indexer = indexer or EdgeIndexer("TSP", n)
    pair_bit = _pair_bit_table(indexer)
    for perm in itertools.permutations(range(2, n + 1)):
        if perm[0] > perm[-1]:
            continue
        mask = pair_bit[1][perm[0]] | pair_bit[1][perm[-1]]
        for a, b in zip(perm, perm[1:]):
            mask |= pair_bit[a][b]
        yield mask


def _pair_bit_table(indexer):
    n = indexer.n
    table = [[0] * (n + 1) for _ in range(n + 1)]
    for (u, v) in indexer.edges:
        bit = 1 << indexer.index_of((u, v))
        table[u][v] = bit
        table[v][u] = bit
    return table


def iter_stgp_trees(n, indexer=None):
    """All n^(n-2) labeled spanning trees of K_n, via Prufer decoding."""
    indexer = indexer or EdgeIndexer("STGP", n)
    pair_bit = _pair_bit_table(indexer)
    if n == 2:
        yield pair_bit[1][2]
        return
    for seq in itertools.product(range(1, n + 1), repeat=n - 2):
        degree = [1] * (n + 1)
        for v in seq:
            degree[v] += 1
        mask = 0
        # classic decode: repeatedly join the smallest leaf to the next
        # sequence entry, maintaining degrees with a rolling pointer
        ptr = 1
        while degree[ptr] != 1:
            ptr += 1
        leaf = ptr
        for v in seq:
            mask |= pair_bit[leaf][v]
            degree[v] -= 1
            if degree[v] == 1 and v < ptr:
                leaf = v
            else:
                ptr += 1
                while degree[ptr] != 1:
                    ptr += 1
                leaf = ptr
        mask |= pair_bit[leaf][n]
        yield mask


def iter_sthgp_trees(n, indexer=None):
    """All spanning hypertrees of the complete hypergraph on n vertices.

    Recursive scheme anchored at the minimum vertex r of the current
    vertex set: the other vertices are split into blocks (the
    components after deleting r), each block elects the representative
    it attaches through, the representatives are grouped into the
    hyperedges at r, and each block recurses independently.  Every tree
    arises exactly once.
    """
    indexer = indexer or EdgeIndexer("STHGP", n)
    edge_bit = {}
    for i, e in enumerate(indexer.edges):
        vmask = 0
        for v in e:
            vmask |= 1 << v
        edge_bit[vmask] = 1 << i
    yield from _sthgp_rec(tuple(range(1, n + 1)), edge_bit)


def _sthgp_rec(vertices, edge_bit):
    if len(vertices) == 1:
        yield 0
        return
    r = vertices[0]
    rest = vertices[1:]
    rbit = 1 << r
    for blocks in _set_partitions(rest):
        block_masks = []
        for block in blocks:
            bm = 0
            for v in block:
                bm |= 1 << v
            block_masks.append(bm)
        for reps in itertools.product(*blocks):
            rep_bits = [1 << v for v in reps]
            for groups in _set_partitions(tuple(range(len(reps)))):
                star = 0
                for g in groups:
                    vmask = rbit
                    for gi in g:
                        vmask |= rep_bits[gi]
                    star |= edge_bit[vmask]
                yield from _sthgp_block_product(star, blocks, edge_bit, 0)


def _sthgp_block_product(acc, blocks, edge_bit, i):
    if i == len(blocks):
        yield acc
        return
    for sub in _sthgp_rec(blocks[i], edge_bit):
        yield from _sthgp_block_product(acc | sub, blocks, edge_bit, i + 1)


def _set_partitions(items):
    """All partitions of a sequence into nonempty blocks (tuples)."""
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        # first joins an existing block, or founds its own
        for i, block in enumerate(part):
            yield part[:i] + ((first,) + block,) + part[i + 1:]
        yield ((first,),) + part


_ITERATORS = {"TSP": iter_tsp_tours, "STGP": iter_stgp_trees,
              "STHGP": iter_sthgp_trees}


def iter_extreme_points(family, n, accept_cost=False):
    """Generator over all extreme points (coordinate bitmasks)."""
    _check_guard(family, n, accept_cost)
    return _ITERATORS[family](n)


def enumerate_extreme_points(family, n, accept_cost=False):
    """Materialize the complete extreme point set."""
    _check_guard(family, n, accept_cost)
    indexer = EdgeIndexer(family, n)
    points = list(_ITERATORS[family](n, indexer))
    return ExtremePointSet(indexer, points)


def count_extreme_points(family, n, accept_cost=False):
    """|X| by exhausting the generator (no counting formulas here;
    this is the oracle side)."""
    _check_guard(family, n, accept_cost)
    return sum(1 for _ in _ITERATORS[family](n))


def visit_extreme_points(family, n, visitor, accept_cost=False):
    """Call visitor(bitmask) once per extreme point, serially, without
    materializing the set."""
    _check_guard(family, n, accept_cost)
    for mask in _ITERATORS[family](n):
        visitor(mask)


# ---------------------------------------------------------------------------
# Facet construction.


def build_facet(indexer, spec):
    """Coefficient vector, right-hand side and sense for a facet spec.

    Vertex labeling is canonical: subtours sit on S = {1..k} and comb
    classes occupy consecutive vertices in the order B1, T1, B2, T2,
    B3, T3, H, O.
    """
    if not isinstance(spec, FacetSpec):
        raise ValueError("expected a FacetSpec")
    if spec.n != indexer.n:
        raise ValueError("spec is for n=%d but indexer has n=%d"
                         % (spec.n, indexer.n))
    if spec.family is not None and spec.family != indexer.family:
        raise ValueError("spec family %s does not match indexer family %s"
                         % (spec.family, indexer.family))
    n = indexer.n
    if isinstance(spec, TspNonNeg):
        return _unit_facet(indexer, (1, 2))
    if isinstance(spec, SthgpNonNeg):
        return _unit_facet(indexer, tuple(range(1, spec.k + 1)))
    if isinstance(spec, TspSubtour):
        s = set(range(1, spec.k + 1))
        a = tuple(1 if (u in s) != (v in s) else 0 for (u, v) in indexer.edges)
        return Hyperplane(a, 2, ">=")
    if isinstance(spec, StgpSubtour):
        s = set(range(1, spec.k + 1))
        a = tuple(1 if (u in s and v in s) else 0 for (u, v) in indexer.edges)
        return Hyperplane(a, spec.k - 1, "<=")
    if isinstance(spec, SthgpSubtour):
        s = set(range(1, spec.k + 1))
        a = tuple(max(len(s.intersection(e)) - 1, 0) for e in indexer.edges)
        return Hyperplane(a, spec.k - 1, "<=")
    if isinstance(spec, TspComb3):
        return _comb_facet(indexer, spec)
    if isinstance(spec, AffineHull):
        if indexer.family == "TSP":
            raise ValueError("the TSP affine hull is n degree equations; "
                             "use affine_hull_equations")
        if indexer.family == "STGP":
            return Hyperplane((1,) * indexer.m, n - 1, "==")
        a = tuple(len(e) - 1 for e in indexer.edges)
        return Hyperplane(a, n - 1, "==")
    raise ValueError("unhandled facet spec %r" % (spec,))


def _unit_facet(indexer, edge):
    a = [0] * indexer.m
    a[indexer.index_of(edge)] = 1
    return Hyperplane(tuple(a), 0, ">=")


def comb_vertex_classes(spec):
    """Vertex sets (handle, tooth1, tooth2, tooth3) for a comb spec
    under the canonical consecutive labeling."""
    sizes = (spec.b1, spec.t1, spec.b2, spec.t2, spec.b3, spec.t3,
             spec.h, spec.o)
    bounds = [0]
    for s in sizes:
        bounds.append(bounds[-1] + s)
    cls = [set(range(bounds[i] + 1, bounds[i + 1] + 1)) for i in range(8)]
    b1, t1, b2, t2, b3, t3, h_set, _ = cls
    handle = h_set | b1 | b2 | b3
    return handle, b1 | t1, b2 | t2, b3 | t3


def _comb_facet(indexer, spec):
    handle, tooth1, tooth2, tooth3 = comb_vertex_classes(spec)
    groups = (handle, tooth1, tooth2, tooth3)
    a = []
    for (u, v) in indexer.edges:
        a.append(sum(1 for g in groups if u in g and v in g))
    rhs = len(handle) + len(tooth1) + len(tooth2) + len(tooth3) - 5
    return Hyperplane(tuple(a), rhs, "<=")


def affine_hull_equations(indexer):
    """The affine hull of the polytope as a list of Hyperplanes.

    TSP(n) is cut out by the n vertex-degree equations x(delta(v)) = 2;
    the tree families each have the single total-material equation.
    """
    if indexer.family == "TSP":
        eqs = []
        for v in range(1, indexer.n + 1):
            a = tuple(1 if v in e else 0 for e in indexer.edges)
            eqs.append(Hyperplane(a, 2, "=="))
        return eqs
    return [build_facet(indexer, AffineHull(indexer.n))]


# ---------------------------------------------------------------------------
# Incidence counting.


def count_incident(points, h):
    """Number of points with a . x = b exactly."""
    return len(incident_indices(points, h))


def incident_points(points, h):
    """The sub-ExtremePointSet lying on the hyperplane."""
    return points.subset(incident_indices(points, h))


def incident_indices(points, h):
    if h.m != points.indexer.m:
        raise ValueError("hyperplane dimension %d does not match indexer m=%d"
                         % (h.m, points.indexer.m))
    # Vectorized: coefficients and row sums stay far below 2^53, so
    # float64 matmul (BLAS) is exact here.
    a = np.array([float(c) for c in h.a])
    b = float(h.b)
    out = []
    pts = points.points
    for start in range(0, len(pts), 65536):
        rows = _bits_to_array(pts[start:start + 65536], points.indexer.m)
        vals = rows.astype(np.float64) @ a
        hits = np.nonzero(vals == b)[0]
        out.extend(int(start + i) for i in hits)
    return out


def satisfy_all(points, hyperplanes):
    """True if every point satisfies every hyperplane (with senses)."""
    return all(h.satisfied_bits(p) for p in points for h in hyperplanes)


@dataclass
class SurveyResult:
    count: int
    coordinate_sums: np.ndarray
    tight_counts: list


def survey(family, n, hyperplanes=(), accept_cost=False, chunk=32768):
    """Single streaming pass over all extreme points: total count,
    exact per-coordinate sums, and tight-point counts for each given
    hyperplane.  Handles point sets too large to materialize."""
    _check_guard(family, n, accept_cost)
    indexer = EdgeIndexer(family, n)
    for h in hyperplanes:
        if h.m != indexer.m:
            raise ValueError("hyperplane dimension mismatch")
    mat = np.array([[float(c) for c in h.a] for h in hyperplanes]).T \
        if hyperplanes else None
    rhs = np.array([float(h.b) for h in hyperplanes])
    count = 0
    sums = np.zeros(indexer.m, dtype=np.int64)
    tight = np.zeros(len(hyperplanes), dtype=np.int64)
    buf = []
    for mask in _ITERATORS[family](n, indexer):
        buf.append(mask)
        if len(buf) >= chunk:
            count += _survey_chunk(buf, indexer.m, mat, rhs, sums, tight)
            buf = []
    if buf:
        count += _survey_chunk(buf, indexer.m, mat, rhs, sums, tight)
    return SurveyResult(count=count, coordinate_sums=sums,
                        tight_counts=[int(t) for t in tight])


def _survey_chunk(buf, m, mat, rhs, sums, tight):
    rows = _bits_to_array(buf, m)
    sums += rows.sum(axis=0, dtype=np.int64)
    if mat is not None:
        vals = rows.astype(np.float64) @ mat
        tight += (vals == rhs[None, :]).sum(axis=0)
    return len(buf)


# ---------------------------------------------------------------------------
# Dump / load.

_MAGIC = b"FGPT"
_FAMILY_TAGS = {"TSP": 1, "STGP": 2, "STHGP": 3}
_TAG_FAMILIES = {v: k for k, v in _FAMILY_TAGS.items()}


def dump_points(points, path, fmt="binary"):
    """Write an ExtremePointSet to disk.

    binary: magic, version, family tag, n, m, count header followed by
    packed little-endian bitset rows.  text: one 0/1 string per line
    (debugging aid).
    """
    indexer = points.indexer
    if fmt == "binary":
        nbytes = (indexer.m + 7) // 8
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<BBHIQ", 1, _FAMILY_TAGS[indexer.family],
                                 indexer.n, indexer.m, len(points)))
            for p in points:
                fh.write(p.to_bytes(nbytes, "little"))
    elif fmt == "text":
        with open(path, "w") as fh:
            for p in points:
                bits = "".join("1" if p >> i & 1 else "0"
                               for i in range(indexer.m))
                fh.write(bits + "\n")
    else:
        raise ValueError("fmt must be 'binary' or 'text'")


def load_points(path):
    """Read a binary dump back into an ExtremePointSet."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValueError("not an extreme point dump: bad magic")
        version, tag, n, m, count = struct.unpack("<BBHIQ", fh.read(16))
        if version != 1:
            raise ValueError("unsupported dump version %d" % version)
        indexer = EdgeIndexer(_TAG_FAMILIES[tag], n)
        if indexer.m != m:
            raise ValueError("dump header m=%d does not match %s(%d)"
                             % (m, indexer.family, n))
        nbytes = (m + 7) // 8
        data = fh.read(count * nbytes)
        if len(data) != count * nbytes:
            raise ValueError("dump is truncated")
        points = [int.from_bytes(data[i * nbytes:(i + 1) * nbytes], "little")
                  for i in range(count)]
    return ExtremePointSet(indexer, points)
