#!/usr/bin/env python3
"""Independent reference arithmetic for the toolkit's regression constants.

Every value printed here is derived from first principles (exact rational
arithmetic where possible, otherwise plain IEEE doubles) without touching the
C++ implementation.  Test files freeze these outputs as named constants; when a
constant in a test looks suspicious, re-run this script and compare.
"""

from fractions import Fraction


def gamma_theta_point(k, l, fk, fl, theta):
    """((k-l)f(k) + k f(k) th) / ((k-l)f(k) + ((k-l)f(k) + l f(l)) th)."""
    num = (k - l) * fk + k * fk * theta
    den = (k - l) * fk + ((k - l) * fk + l * fl) * theta
    return num / den


def eta_theta_point(k, l, fk, fl, theta):
    num = k * fk * (1 + theta)
    den = k * fk + ((k - l) * fk + l * fl) * theta
    return num / den


def gamma_point(k1, l1, f1k, f1l, k2, l2, f2k, f2l):
    num = (l2 - k2) * f2k * k1 * f1k + (k1 - l1) * f1k * k2 * f2k
    den = (l2 - k2) * f2k * l1 * f1l + (k1 - l1) * f1k * l2 * f2l
    return num / den


def gamma_poly(p, q):
    if q == p:
        return 1.0
    r = ((p + 1) ** (p + 1) * q**q / ((q + 1) ** (q + 1) * p**p)) ** (1.0 / (p - q))
    return p**p * r ** (p + 1) / ((p + 1) ** (p + 1) * (r - 1))


def eta_theta_poly(p, theta):
    c = (1 + theta) * (p + 1) ** ((p + 1) / p)
    return c / (c - theta * p)


def gamma_inf_poly(p):
    c = (p + 1) * (p + 1) ** (1.0 / p)
    return c / (c - p)


def gamma_theta_poly(p, theta):
    """sup over t>1 of (t^(p+1)(1+th) - t^p) / (t^(p+1)(1+th) - t^p(1+th) + th),
    via dense log grid + golden-section refinement."""
    import math

    def obj(t):
        tp = t**p
        num = tp * (t * (1 + theta) - 1)
        den = tp * (t * (1 + theta) - (1 + theta)) + theta
        return num / den

    n = 200_000
    best_i, best_v = 0, float("-inf")
    ts = [10 ** (4 * (i + 1) / n) for i in range(n)]
    for i, t in enumerate(ts):
        v = obj(t)
        if v > best_v:
            best_i, best_v = i, v
    lo = ts[best_i - 1] if best_i > 0 else 1.0 + 1e-12
    hi = ts[best_i + 1] if best_i + 1 < n else ts[-1]
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = obj(c), obj(d)
    for _ in range(200):
        if b - a < 1e-13:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = obj(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = obj(d)
    return max(best_v, fc, fd)


def multilevel_predicted(k, l, fk, fl, theta, n, m):
    """Exact SUM(eq)/SUM(opt) of the m-level load-balancing construction."""
    k, l, fk, fl, theta = map(Fraction, (k, l, fk, fl, theta))
    size = lambda s: Fraction(n) ** (m - 1) * (l / k) ** (m - s)
    sum_eq = sum(size(s) * k * fk for s in range(1, m))
    sum_opt = sum(
        size(s)
        * l
        * ((1 - (1 + theta) ** (s - m)) * fl + (1 + theta) ** (s - m) * fk)
        for s in range(2, m + 1)
    )
    return sum_eq / sum_opt


def bpr_twolink_bruteforce(resolution):
    """Grid oracle for the two-link game l1 = 1 + x^4, l2 = 2, demand 1."""
    best_sum = float("inf")
    best_gap, best_gap_sum = float("inf"), None
    for i in range(resolution + 1):
        x = i / resolution
        c1, c2 = 1 + x**4, 2.0
        s = x * c1 + (1 - x) * c2
        mn = min(c1, c2)
        gap = x * (c1 - mn) + (1 - x) * (c2 - mn)
        best_sum = min(best_sum, s)
        if gap < best_gap:
            best_gap, best_gap_sum = gap, s
    return best_gap_sum / best_sum


def main():
    print("# pointwise quantities (exact rationals)")
    print("gamma_theta_point(2,1,id,th=1)   =", gamma_theta_point(*map(Fraction, (2, 1, 2, 1, 1))))
    print("gamma_theta_point limit th->inf  =", Fraction(2 * 2, (2 - 1) * 2 + 1 * 1))
    print("eta_theta_point(2,1,id,th=1)     =", eta_theta_point(*map(Fraction, (2, 1, 2, 1, 1))))
    print("gamma_point(2,1,id, .5,1,id)     =", gamma_point(*map(Fraction, (2, 1, 2, 1, Fraction(1, 2), 1, Fraction(1, 2), 1))))
    print("gamma_point(1.1,1,id, 1,1,id)    =", gamma_point(*map(Fraction, (Fraction(11, 10), 1, Fraction(11, 10), 1, 1, 1, 1, 1))))

    print()
    print("# multilevel construction, k=2 l=1 f=id theta=1 n=2 (exact)")
    for m in (3, 4, 8, 14):
        v = multilevel_predicted(2, 1, 2, 1, 1, 2, m)
        print(f"multilevel_predicted(m={m:2d})       = {v} = {float(v)!r}")

    print()
    print("# polynomial-class closed forms (doubles)")
    for p, q in ((2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3)):
        print(f"gamma_poly({p},{q})                  = {gamma_poly(p, q)!r}")
    for p in (1, 2, 3, 4):
        print(f"gamma_inf_poly({p})                 = {gamma_inf_poly(p)!r}")
    for p, th in ((1, 0.5), (1, 1), (2, 0.5), (2, 1), (3, 0.5), (3, 1), (4, 0.5), (4, 1)):
        print(f"eta_theta_poly({p},{th})             = {eta_theta_poly(p, th)!r}")

    print()
    print("# numeric sup cross-check of the general-theta curve (doubles)")
    for p, th in ((1, 0.5), (1, 1), (2, 0.5), (2, 1), (3, 0.5), (3, 1), (4, 0.5), (4, 1)):
        print(f"gamma_theta_poly({p},{th})           = {gamma_theta_poly(p, th)!r}")

    print()
    print("# two-link BPR-style game l1=1+x^4, l2=2, demand 1")
    x = 5.0 ** (-0.25)
    opt = 2 - x + x**5
    print("exact opt load on link 1         =", repr(x))
    print("exact opt SUM                    =", repr(opt))
    print("exact PoA = 2/optSUM             =", repr(2.0 / opt))
    print("eta_theta_poly(4,1) (same game)  =", repr(eta_theta_poly(4, 1)))
    print("bruteforce PoA, resolution 1e4   =", repr(bpr_twolink_bruteforce(10_000)))

    print()
    print("# pigou-like family: PoA(c) = 4/((c+1)(3-c))")
    for c in (Fraction(0), Fraction(1, 2), Fraction(1)):
        poa = Fraction(4) / ((c + 1) * (3 - c))
        print(f"pigou_poa(c={c})                 = {poa} = {float(poa)!r}")


if __name__ == "__main__":
    main()
