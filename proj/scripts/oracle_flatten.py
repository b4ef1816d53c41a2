#!/usr/bin/env python3
"""Standalone oracle for the cluster-selection flattening nonlinearity.

Evaluates f(p, B) = exp(log(p) / log(e + lambda*B)) followed by
renormalization, on the 13-element effectiveness vector, and prints the
outputs at a grid of B values with 17 significant digits. The printed
values are frozen into the acceptance test as expected constants.
"""
import math

VEC = [1, 10, 2, 4, 45, 60, 100, 40, 85, 170, 150, 300, 250]
LAMBDA = 18.0
B_GRID = [0.0, 0.01, 0.16, 1.0, 10.0]


def flatten(p, b, lam=LAMBDA):
    denom = math.log(math.e + lam * b)
    f = [math.exp(math.log(x) / denom) for x in p]
    s = sum(f)
    return [x / s for x in f]


def main():
    s = sum(VEC)
    p = [v / s for v in VEC]
    print("# normalized input")
    print(", ".join(f"{x:.17g}" for x in p))
    for b in B_GRID:
        out = flatten(p, b)
        ratio = max(out) / min(out)
        print(f"# B = {b}  max/min = {ratio:.17g}")
        print(", ".join(f"{x:.17g}" for x in out))


if __name__ == "__main__":
    main()
