"""Per-k subtour strength tables for all three polytopes.

Walks the subtour families at a small n, prints both indicators side by
side, then reproduces the weakest-cardinality table at n = 10, 100 and
1000.  Note how the two indicators bottom out at different k once n
grows: that gap is the whole point of keeping both around.
"""

from facetgauge import analysis


def print_table(family, n):
    print("%s(%d) subtours" % (family, n))
    print("  %3s  %-22s %-22s" % ("k", "EPR", "CD"))
    epr = analysis.sweep(family, n, "EPR")
    cd = analysis.sweep(family, n, "CD")
    for (k, e_val, e_f), (_, _, c_f) in zip(epr.rows, cd.rows):
        print("  %3d  %-22.6g %-22.6g" % (k, e_f, c_f))
    print()


def weakest_table():
    print("weakest STHGP subtour cardinality by indicator")
    print("  %6s  %-12s %-12s" % ("n", "EPR argmin", "CD argmax"))
    for n in (10, 100, 1000):
        e = analysis.weakest_subtour("STHGP", n, "EPR")
        c = analysis.weakest_subtour("STHGP", n, "CD")
        print("  %6d  %-12d %-12d" % (n, e, c))
    print()
    print("at n = 10 the two pick neighbors (4 vs 5); by n = 1000 they")
    print("are 92 apart, so a cut ranked weak by one indicator can sit")
    print("well inside the strong region of the other.")


def main():
    for family in ("TSP", "STGP", "STHGP"):
        print_table(family, 10)
    weakest_table()


if __name__ == "__main__":
    main()
