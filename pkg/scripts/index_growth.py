#!/usr/bin/env python3
"""Index of Q-tilde_{2,n} in the full automorphism group for n = 1..3."""

from arbor_cubic.groups import aut_order, q_group


def main() -> None:
    previous = 0
    for n in (1, 2, 3):
        index = aut_order(n) // q_group(2, n, tilde=True).order
        trend = "" if n == 1 else ("grows" if index > previous else "flat")
        print(f"n={n}: [Aut : Qtilde_2,n] = {index} {trend}".rstrip())
        previous = index


if __name__ == "__main__":
    main()
