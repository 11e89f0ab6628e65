"""Where the two indicators rank subtour pairs oppositely.

For each pair (k1, k2) of STHGP subtour sizes, ask both indicators
which one is the stronger cut.  Cells where they disagree form a band
that straddles the weak trough: one k from each flank, never two
strong cuts.  At n = 10 there is exactly one disagreeing pair.
"""

from facetgauge import analysis


def draw(n):
    matrix = analysis.disagreement_matrix(n)
    ks = matrix.ks
    print("n = %d: %d disagreeing pairs (k1 < k2), fraction %.3f"
          % (n, len(matrix.disagreeing_pairs()),
             matrix.fraction_disagreeing()))
    step = max(1, len(ks) // 38)
    shown = ks[::step]
    header = "     " + "".join("%3d" % k for k in shown)
    print(header)
    for k1 in shown:
        i = ks.index(k1)
        cells = []
        for k2 in shown:
            j = ks.index(k2)
            cells.append("  X" if matrix.disagree[i, j] else "  .")
        print("%4d %s" % (k1, "".join(cells)))
    print()


def main():
    draw(10)
    draw(40)
    matrix = analysis.disagreement_matrix(40)
    epr_weak = analysis.weakest_subtour("STHGP", 40, "EPR")
    cd_weak = analysis.weakest_subtour("STHGP", 40, "CD")
    print("weakest by EPR: k = %d, weakest by CD: k = %d" %
          (epr_weak, cd_weak))
    straddle = all(k1 <= cd_weak and k2 >= epr_weak
                   for k1, k2 in matrix.disagreeing_pairs())
    print("every disagreeing pair straddles the trough:", straddle)


if __name__ == "__main__":
    main()
