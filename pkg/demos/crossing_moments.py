"""Cross-validate the crossing-count moment formulas by simulation.

Counts virtual crossings of a target interval by point pairs of a Poisson
process straddling the x-axis, and compares the empirical first and
second moments against the exact mean 2 h^3 L and the closed-form second
moment upper bound.

Run:  python demos/crossing_moments.py
"""

from spanlab import analytic, mc


def main() -> None:
    print(f"{'h':>5} {'L':>5} {'mean N':>16} {'2h^3L':>8} "
          f"{'mean N^2':>16} {'bound':>8}")
    for h, L in ((1.0, 1.0), (2.0, 0.5), (1.5, 1.0), (0.8, 1.4)):
        first, second = mc.crossing_experiment(h, L, replicates=1000,
                                               master_seed=7)
        bound = analytic.second_moment_upper(h, L)
        print(f"{h:5.1f} {L:5.1f} {first.mean:9.3f} +- {3 * first.se:.3f}"
              f" {2 * h ** 3 * L:8.3f}"
              f" {second.mean:9.3f} +- {3 * second.se:.3f} {bound:8.3f}")
    print()
    print("the second-moment bound is valid for h > L/2 and tightens to the")
    print("Poisson value lambda^2 + lambda as the strip grows:")
    h = 1e5
    lam = 1.0
    bound = analytic.second_moment_upper(h, lam / (2.0 * h ** 3))
    print(f"  h = 1e5: bound = {bound:.6f}, lambda^2 + lambda = {lam**2 + lam}")


if __name__ == "__main__":
    main()
