#!/usr/bin/env python3
"""Independent recomputation of the expected values frozen into the C++ tests.

Evaluates the closed-form speedup/efficiency/bound expressions and the small
Jacobi examples directly in Python (doubles), with an mpmath cross-check at
50 digits. Run it whenever a frozen constant in the test sources needs to be
re-derived.
"""
import math

import mpmath

mpmath.mp.dps = 50

# "paper-tornado" preset: cluster timings published for the Tornado system.
L = 1.5e-5
TAU_OP = 2.9e-8
TAU_TR = 1.9e-7


def m_costs(n, k):
    # send / work / receive-all / master-process times of the Map variant
    return dict(
        L=L,
        t_s=TAU_TR * n,
        t_w=2.0 * TAU_OP * n * n,
        t_R=TAU_TR * n,
        t_p=2.0 * TAU_OP * (n + 1),
    )


def mr_costs(n, k):
    return dict(
        L=L,
        t_s=TAU_TR * n,
        t_w=TAU_OP * (n * n + n * (n - k)),
        t_r=TAU_TR * n,
        t_a=TAU_OP * n,
        t_p=3.0 * TAU_OP * n,
        l=n,
    )


def speedup_m(c, k):
    num = k * (2 * c["L"] + c["t_s"] + c["t_R"] + c["t_p"] + c["t_w"])
    den = k * k * (2 * c["L"] + c["t_s"]) + k * (c["t_R"] + c["t_p"]) + c["t_w"]
    return num / den


def speedup_mr(c, k):
    num = 2 * c["L"] + c["t_s"] + c["t_r"] + c["t_p"] + c["t_w"] + c["l"] * c["t_a"]
    den = (
        k * (2 * c["L"] + c["t_s"] + c["t_r"] + c["t_a"])
        + (c["t_w"] + c["l"] * c["t_a"]) / k
        - c["t_a"]
        + c["t_p"]
    )
    return num / den


def bound_m(c):
    return math.sqrt(c["t_w"] / (2 * c["L"] + c["t_s"]))


def bound_mr_fixed_point(n):
    k = 1.0
    for _ in range(100):
        c = mr_costs(n, k)
        nxt = math.sqrt(
            (c["t_w"] + c["l"] * c["t_a"])
            / (2 * c["L"] + c["t_s"] + c["t_r"] + c["t_a"])
        )
        if abs(nxt - k) < 1e-9:
            return nxt
        k = nxt
    return k


def bound_mr_quadratic(n):
    # closed form of the same fixed point: a*K^2 + tau_op*n*K - 3*tau_op*n^2 = 0
    a = mpmath.mpf(2) * (mpmath.mpf(L) + mpmath.mpf(TAU_TR) * n) + mpmath.mpf(TAU_OP) * n
    b = mpmath.mpf(TAU_OP) * n
    c = -3 * mpmath.mpf(TAU_OP) * n * n
    return float((-b + mpmath.sqrt(b * b - 4 * a * c)) / (2 * a))


def main():
    print("== Jacobi-M costs, n=1500 ==")
    c = m_costs(1500, 20)
    for key, value in c.items():
        print(f"  {key} = {value!r}")

    print("== speedup_m / efficiency_m at n=1500, K=20 ==")
    s20 = speedup_m(c, 20)
    print(f"  speedup    = {s20!r}")
    print(f"  efficiency = {s20 / 20!r}")

    print("== Jacobi-M scalability bounds ==")
    for n in (1500, 5000, 10000, 16000):
        cn = m_costs(n, 1)
        b = bound_m(cn)
        print(f"  n={n:<6} bound={b!r}  bound/sqrt(n)={b / math.sqrt(n)!r}")

    print("== Jacobi-M integer argmax, n=1500 ==")
    c = m_costs(1500, 1)
    best_k = max(range(1, 65), key=lambda k: speedup_m(c, k))
    print(f"  argmax K in 1..64 = {best_k}  (bound {bound_m(c)!r})")

    print("== Jacobi-MR, n=1500, K=20 ==")
    cmr = mr_costs(1500, 20)
    print(f"  t_w = {cmr['t_w']!r}")
    print(f"  speedup = {speedup_mr(cmr, 20)!r}")

    print("== Jacobi-MR fixed-point bounds ==")
    for n in (1500, 5000, 10000, 16000):
        fp = bound_mr_fixed_point(n)
        quad = bound_mr_quadratic(n)
        print(
            f"  n={n:<6} fixed_point={fp!r} quadratic={quad!r} "
            f"ratio/sqrt(n)={fp / math.sqrt(n)!r}"
        )

    print("== 2x2 demo system ==")
    # A = [[2,1],[1,3]], b = [3,4]  ->  C = [[0,-1/2],[-1/3,0]], d = [3/2,4/3]
    d = [1.5, 4.0 / 3.0]
    cmat = [[0.0, -0.5], [-1.0 / 3.0, 0.0]]
    x = d[:]
    print(f"  d = {d!r}")
    step = [
        d[0] + cmat[0][0] * x[0] + cmat[0][1] * x[1],
        d[1] + cmat[1][0] * x[0] + cmat[1][1] * x[1],
    ]
    print(f"  first step = {step!r}")
    for it in range(1, 200):
        nxt = [
            d[0] + cmat[0][0] * x[0] + cmat[0][1] * x[1],
            d[1] + cmat[1][0] * x[0] + cmat[1][1] * x[1],
        ]
        delta = (nxt[0] - x[0]) ** 2 + (nxt[1] - x[1]) ** 2
        x = nxt
        if delta < 1e-12:
            break
    print(f"  converged after {it} iterations: x = {x!r}")
    print(f"  |x - (1,1)|_inf = {max(abs(x[0] - 1), abs(x[1] - 1))!r}")

    print("== mpmath cross-check (50 digits) ==")
    n = mpmath.mpf(1500)
    ts = mpmath.mpf(TAU_TR) * n
    tw = 2 * mpmath.mpf(TAU_OP) * n * n
    tp = 2 * mpmath.mpf(TAU_OP) * (n + 1)
    k = mpmath.mpf(20)
    num = k * (2 * mpmath.mpf(L) + ts + ts + tp + tw)
    den = k * k * (2 * mpmath.mpf(L) + ts) + k * (ts + tp) + tw
    print(f"  speedup_m(n=1500,K=20) = {mpmath.nstr(num / den, 20)}")
    print(f"  bound_m(n=1500)        = {mpmath.nstr(mpmath.sqrt(tw / (2 * mpmath.mpf(L) + ts)), 20)}")


if __name__ == "__main__":
    main()
