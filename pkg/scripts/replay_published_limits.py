"""Limit distributions of the two bundled period transition matrices.

Rows are given in percent and renormalized before the fixed point is computed.
Also prints the powers-of-P gap as a second route to the same vector.
"""

from importlib import resources

import numpy as np

from graphsom import trajectory


def main():
    data = resources.files("graphsom") / "data"
    for period in (1, 2):
        rows, _ = trajectory.read_matrix(data / f"transitions_period{period}.txt")
        tm = trajectory.from_probabilities(rows, percent=True)
        pi = trajectory.stationary(tm)
        power = np.linalg.matrix_power(tm.probs, 512)
        print(f"period {period}: limit {np.array2string(pi, precision=4)}")
        print(f"  fixed-point residual {np.max(np.abs(pi @ tm.probs - pi)):.2e}, "
              f"max gap to P^512 rows {np.max(np.abs(power - pi)):.2e}")


if __name__ == "__main__":
    main()
