"""
Demonstration of the sign-change moment library.

Walks through the closed forms, the IIA comparison, the QMC orthant engine
and the Monte Carlo simulator at rho = 1/2.
"""

import os
import sys

# Add parent to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from sign_changes.iia import iia_variance, separation_search
from sign_changes.mc import SimConfig, simulate
from sign_changes.moments import mean_sign_changes, variance_exact, variance_numeric
from sign_changes.mvn import ar1_matrix, orthant_qmc
from sign_changes.orthant import (
    cheng_I, cheng_I_quadrature, f4, g4, outlier_orthant, p11111, q_pattern_4of5,
)

RHO = 0.5


def demo_closed_forms():
    """Four-point constants and the appendix terms."""
    print("=" * 60)
    print("DEMO 1: Closed-form orthant probabilities")
    print("=" * 60)

    print("\n1.1 Cheng's integral, dilogarithm form vs quadrature:")
    for h, x in ((0.5, 0.125), (0.8, 0.5), (0.95, 0.85)):
        print(f"    I({h}, {x}) = {cheng_I(h, x):.17g}  (quad {cheng_I_quadrature(h, x):.17g})")

    print(f"\n1.2 Four-point probabilities at rho = {RHO}:")
    for label, value in (
        ("f(r,r)", f4(RHO, RHO)),
        ("g(r,r)", g4(RHO, RHO)),
        ("f(r,-r)", f4(RHO, -RHO)),
        ("g(r,-r)", g4(RHO, -RHO)),
        ("f(-r,r)", f4(-RHO, RHO)),
        ("f(-r,-r)", f4(-RHO, -RHO)),
    ):
        print(f"    {label:<9} {value:.17g}")

    print("\n1.3 Five-point terms:")
    print(f"    q_1245    {q_pattern_4of5((1, 2, 4, 5), RHO):.17g}")
    print(f"    q_1235    {outlier_orthant(RHO):.17g}")
    print(f"    p_11111   {p11111(RHO):.17g}")


def demo_moments():
    """Exact moments against the IIA model."""
    print("\n" + "=" * 60)
    print("DEMO 2: Moments of S_n and the IIA model")
    print("=" * 60)

    print(f"\n2.1 E(S_n) and V(S_n) at rho = {RHO}:")
    for n in (2, 3, 4):
        print(f"    n={n}  mean {mean_sign_changes(n, RHO):.12f}  "
              f"var {variance_exact(n, RHO):.12f}  iia {iia_variance(n, RHO):.12f}")

    print("\n2.2 Largest model/theory gap for n = 4:")
    for side in ("positive", "negative"):
        result = separation_search(4, side)
        print(f"    {side:<9} rho* = {result.rho_star:+.4f}  separation = {result.separation:.5f}")

    print("\n2.3 n = 5 from QMC pattern probabilities:")
    report = variance_numeric(5, RHO, tol=1e-8)
    print("    " + report.summary().replace("\n", "\n    "))


def demo_oracles():
    """QMC and Monte Carlo against the closed forms."""
    print("\n" + "=" * 60)
    print("DEMO 3: Oracles")
    print("=" * 60)

    print("\n3.1 QMC engine on the 4-point AR(1) matrix:")
    estimate = orthant_qmc(ar1_matrix(RHO, 4), "1111", tol=1e-10)
    print(f"    p_1111 qmc    {estimate.value:.17g} +/- {estimate.error:.2g} ({estimate.status.value})")
    print(f"    p_1111 closed {f4(RHO, RHO):.17g}")

    print("\n3.2 Monte Carlo, 10^6 paths:")
    result = simulate(SimConfig(n=4, rho=RHO, paths=10 ** 6, seed=42))
    print("    " + result.summary().replace("\n", "\n    "))
    print(f"    exact variance {variance_exact(4, RHO):.17g}")


def main():
    print("\n" + "#" * 60)
    print("#  SIGN CHANGES IN AR(1) SEGMENTS - DEMONSTRATION")
    print("#" * 60)

    demo_closed_forms()
    demo_moments()
    demo_oracles()

    print("\n" + "=" * 60)
    print("All demos completed!")
    print("=" * 60)


if __name__ == "__main__":
    main()
