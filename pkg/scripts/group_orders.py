#!/usr/bin/env python3
"""Orders of Q, Q-tilde and H at small depth, from stabilizer chains, beside the closed forms."""

import time

from arbor_cubic.groups import aut_order, h_subgroup, q_group, q_order


def main() -> None:
    print(f"{'group':<14}{'BSGS order':>16}{'closed form':>16}{'seconds':>9}")
    rows = [("Q", 2, 2), ("Q", 2, 3), ("Q", 3, 3), ("Qtilde", 2, 2), ("Qtilde", 2, 3), ("H", 2, 2), ("H", 3, 3)]
    for name, ell, n in rows:
        start = time.perf_counter()
        if name == "H":
            order, expected = h_subgroup(ell).order, q_order(ell, n) // 4
        else:
            tilde = name == "Qtilde"
            order, expected = q_group(ell, n, tilde).order, q_order(ell, n, tilde)
        print(f"{name}_{{{ell},{n}}}".ljust(14) + f"{order:>16}{expected:>16}{time.perf_counter() - start:>9.2f}")
    print(f"|Aut(T_3,3)| = {aut_order(3)}")


if __name__ == "__main__":
    main()
