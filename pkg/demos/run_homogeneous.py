"""Homogeneous torus systems: shift plus times-b, dimension via G x N entropy.

Digit subshifts on Z x N make the invariances automatic.  The full base-2
system is the whole torus power (dimension 1); restricting the digit columns
to the golden-mean rule drops the value to log phi / log 2.
"""
import math
from fractions import Fraction

from meandim import (FolnerDescriptor, HomogeneousSpec,
                     homogeneous_covering_probe, homogeneous_gxn_entropy,
                     homogeneous_slope_series)
from meandim.subshifts import Alphabet, Rule, SubshiftSpec

LOG_PHI = math.log((1 + math.sqrt(5)) / 2)


def main():
    full = HomogeneousSpec(base=2, digit_spec=SubshiftSpec(
        2, Alphabet(2), Rule.full(2), "digits-full"))
    out = homogeneous_gxn_entropy(full, FolnerDescriptor("boxes", (1, 2)),
                                  depths=(2, 4, 8))
    print(f"full base-2 digits: dimension prediction {out['prediction']:.9f}")

    vg = HomogeneousSpec(base=2, digit_spec=SubshiftSpec(
        2, Alphabet(2), Rule.nearest_neighbor(2, {1: [(1, 1)]}),
        "digits-vertical-golden"))
    out2 = homogeneous_gxn_entropy(vg, FolnerDescriptor("boxes", (1,)),
                                   depths=(4, 8, 16))
    print(f"golden digit columns: prediction {out2['prediction']:.4f} "
          f"-> log phi / log 2 = {LOG_PHI / math.log(2):.4f}")

    rows = homogeneous_covering_probe(full, FolnerDescriptor("boxes", (1,)),
                                      [Fraction(1, 4), Fraction(1, 8)])
    print("\ncovering comparison (plain metric at eps versus product-action "
          "metric at 1/(2cb)):")
    for r in rows:
        print(f"  eps={r.eps}: implication exact over {r.pairs_checked} "
              f"pairs; counts [{r.left_lower},{r.left_upper}] <= "
              f"[{r.right_lower},{r.right_upper}]")

    slopes = homogeneous_slope_series(full, [Fraction(1, 2 ** 4),
                                             Fraction(1, 2 ** 8)])
    print("\nper-coordinate circle-cover slopes:",
          [round(r["slope"], 4) for r in slopes])


if __name__ == "__main__":
    main()
