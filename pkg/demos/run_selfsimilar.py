"""Self-similar systems: spanning clouds, the entropy bound, the embedding.

The attractor of x -> c x + H(w) over a symbolic driving shift has metric
mean dimension equal to its mean Hausdorff dimension, both at most
h_top(driving) / log(1/c); the probe certifies covering upper counts and
regresses their slope against that bound.
"""
import math
from fractions import Fraction

from meandim import (SelfSimilarSpec, contraction_embedding_check, full_shift,
                     golden_mean, selfsimilar_cover_probe,
                     selfsimilar_spanning_cloud, selfsimilar_upper_bound)
from meandim.groups import GroupSpec, box, interval

LOG_PHI = math.log((1 + math.sqrt(5)) / 2)


def main():
    for name, omega, true_h in (("full 2-symbol", full_shift(2), math.log(2)),
                                ("golden-mean", golden_mean(), LOG_PHI)):
        for c in (Fraction(1, 2), Fraction(1, 3)):
            spec = SelfSimilarSpec(omega=omega, values=(0, 1), c=c)
            bound = selfsimilar_upper_bound(spec)
            grid = [c ** j for j in range(2, 9)]
            probe = selfsimilar_cover_probe(spec, grid,
                                            [box(512, GroupSpec(1))])
            print(f"{name}, c={c}: slope {probe['slopes'][512]:.4f} <= "
                  f"bound {true_h / math.log(1 / float(c)):.4f} + 0.05 "
                  f"(entropy {bound['entropy']:.4f}, "
                  f"{bound['entropy_provenance']})")

    spec = SelfSimilarSpec(omega=full_shift(2), values=(0, 1), c=Fraction(1, 2))
    cloud = selfsimilar_spanning_cloud(spec, 3, [bytes([0]), bytes([1])],
                                       interval(0, 0))
    print("\ndepth-3 spanning cloud on the single-cell window:",
          sorted(str(p[0]) for p in cloud.cloud.points))

    big = selfsimilar_spanning_cloud(spec, 6, [bytes([0]), bytes([1])],
                                     interval(0, 0))
    out = contraction_embedding_check(spec, big, target_index=11,
                                      eps=Fraction(1, 4),
                                      sample_pairs=[(big.cloud.points[0],
                                                     big.cloud.points[7])])
    print(f"contraction embedding: depth k={out['k']}, exact similarity "
          f"ratio c^k = {out['ratio']:.6f}, lands inside the target ball: "
          f"{out['inside_ball']}")


if __name__ == "__main__":
    main()
