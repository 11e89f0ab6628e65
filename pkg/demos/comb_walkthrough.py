"""One 3-toothed comb, every validation route.

Takes the smallest comb (n = 6, single-vertex classes), builds the
facet over the enumerated tours, and computes its centroid distance
three ways: the expanded pattern formula, the reduced h-form, and a
numerical projection onto the affine hull of the tight tours.  Then
lets the handle grow and prints where the distance settles.
"""

from fractions import Fraction

from facetgauge import closedforms as cf
from facetgauge import enumeration as en
from facetgauge.geometry import hull_distance


def unit_comb():
    spec = cf.TspComb3(n=6, b1=1, t1=1, b2=1, t2=1, b3=1, t3=1, h=0, o=0)
    exact = cf.tsp_comb3_cd2(spec)
    reduced = cf.tsp_comb3_small_cd2(6, 0)
    print("unit comb at n = 6")
    print("  pattern formula: %s = %.6f" % (exact, float(exact)))
    print("  reduced h-form:  %s" % reduced)

    points = en.enumerate_extreme_points("TSP", 6)
    facet = en.build_facet(points.indexer, spec)
    tight = en.incident_points(points, facet)
    centroid = [float(x) for x in points.centroid()]
    proj = hull_distance(tight.float_chunks(), centroid, bounds=False)
    print("  projection:      %.12f over %d tight tours (gap %.1e)"
          % (proj.distance_squared, len(tight),
             abs(proj.distance_squared - float(exact))))
    print()


def growing_handle():
    print("handle h grows, teeth stay single vertices, n -> infinity:")
    for h in range(5):
        limit = cf.tsp_comb3_small_limit(h)
        at_40 = cf.tsp_comb3_small_cd2(40, h)
        print("  h=%d  d2(n=40) = %-10.6f limit = %s = %.6f"
              % (h, float(at_40), limit, float(limit)))
    print()
    print("the limit peaks at h = 1 (25/9), then falls back through 8/3")
    print("at h = 4 and keeps sinking toward 2 from above, the same")
    print("ceiling the half-size subtours climb toward from below, so")
    print("wide handles converge to plain subtour strength.")
    far = cf.tsp_comb3_small_limit(40)
    print("  h=40 limit = %s = %.4f" % (far, float(far)))
    assert Fraction(2) < far < Fraction(8, 3)


def main():
    unit_comb()
    growing_handle()


if __name__ == "__main__":
    main()
