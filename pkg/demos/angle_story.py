"""Angles between subtour facets, exact and by brute force.

The cosine of the angle between two subtour hyperplanes inside the
affine hull is an integer over the square root of an integer.  This
script prints a few of them, re-derives one from raw coordinate
vectors, and follows the complementary pair (S, V minus S) as n grows:
the two facets fold flat onto each other.
"""

import math

from facetgauge import closedforms as cf
from facetgauge.geometry import interior_angle_cosine


def sample_angles():
    print("subtour angle samples at n = 6 (p, q vertices private to")
    print("each subset, r shared):")
    for p, q, r in [(2, 2, 0), (2, 2, 1), (3, 2, 0), (1, 1, 2)]:
        (num, den_sq), theta = cf.sthgp_subtour_angle(6, p, q, r)
        cos_phi = num / math.sqrt(den_sq)
        print("  (p,q,r)=(%d,%d,%d)  cos phi = %d/sqrt(%d) = %8.5f"
              "  theta = %.5f" % (p, q, r, num, den_sq, cos_phi, theta))
    print()


def first_principles(n, p, q, r):
    """Same cosine from nothing but subset-coordinate vectors."""
    edges = []
    for mask in range(1, 2 ** n):
        e = [v for v in range(1, n + 1) if mask >> (v - 1) & 1]
        if len(e) >= 2:
            edges.append(e)
    s1 = set(range(1, p + r + 1))
    s2 = set(range(p + 1, p + q + r + 1))
    a1 = [max(len(s1.intersection(e)) - 1, 0) for e in edges]
    a2 = [max(len(s2.intersection(e)) - 1, 0) for e in edges]
    c = [len(e) - 1 for e in edges]
    num, den_sq = interior_angle_cosine(a1, a2, c)
    return num, den_sq


def cross_check():
    n, p, q, r = 6, 2, 2, 1
    direct = first_principles(n, p, q, r)
    closed = cf.sthgp_subtour_angle(n, p, q, r)[0]
    print("first-principles dot products vs closed form at "
          "(n,p,q,r)=(%d,%d,%d,%d):" % (n, p, q, r))
    print("  raw vectors: %d/sqrt(%d)" % direct)
    print("  closed form: %d/sqrt(%d)" % closed)
    same = direct[0] * direct[0] * closed[1] == \
        closed[0] * closed[0] * direct[1] and \
        (direct[0] >= 0) == (closed[0] >= 0)
    print("  equal:", same)
    print()


def folding_pair():
    print("complementary subtours S and V-S at |S| = n/2:")
    for k in (2, 5, 10, 20, 40):
        num, den_sq = cf.sthgp_complementary_cosine(2 * k, k)
        print("  n=%3d  cos phi = %9.6f" % (2 * k, num / math.sqrt(den_sq)))
    print("the cosine slides to -1: the two cuts become one wall seen")
    print("from both sides, which is why one of them is redundant in")
    print("large instances.")


def main():
    sample_angles()
    cross_check()
    folding_pair()


if __name__ == "__main__":
    main()
