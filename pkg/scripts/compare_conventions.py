"""d^2 - [omega, -] under both differential conventions, per algebra.

For each finite-field corpus algebra of dimension <= 2 this counts the valid
systems whose residual is nonzero on some cochain of degree <= 1, split by
whether the curvature is balanced.  Under the corrected convention the
failures should be exactly the unbalanced systems; on degree-1 cochains the
residual is f applied to the star associator.
"""

import argparse

from rbforge.cochain import CORRECTED, LITERAL, all_cochains, d_squared_residual_batch, nonzero_rows
from rbforge.corpus import corpus_algebras
from rbforge.search import valid_systems
from rbforge.system import check_curvature_balance


def failures(sys, families, conv):
    return any(len(nonzero_rows(d_squared_residual_batch(sys, f, conv))) for f in families)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-degree", type=int, default=1)
    args = ap.parse_args()

    header = f"{'algebra':10s} {'valid':>6s} {'balanced':>9s} | {'corrected fails':>15s} {'(balanced)':>10s} | {'literal fails':>13s}"
    print(header)
    print("-" * len(header))
    for name, A in sorted(corpus_algebras().items()):
        if not A.field.is_finite:
            continue
        families = [all_cochains(A, n, limit=1 << 12) for n in range(args.max_degree + 1)]
        valid = balanced = corr = corr_bal = lit = 0
        for _, _, sys in valid_systems(A):
            valid += 1
            bal = bool(check_curvature_balance(A, sys.omega))
            balanced += bal
            if failures(sys, families, CORRECTED):
                corr += 1
                corr_bal += bal
            lit += failures(sys, families, LITERAL)
        print(f"{name:10s} {valid:6d} {balanced:9d} | {corr:15d} {corr_bal:10d} | {lit:13d}")


if __name__ == "__main__":
    main()
