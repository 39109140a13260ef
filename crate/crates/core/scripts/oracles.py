#!/usr/bin/env python3
"""Regenerate the constants pinned in `src/specfun.rs` and the high-precision
reference values frozen into the test suites.

Usage: python3 scripts/oracles.py [coeffs|values|integrals|gp_const]

Requires mpmath; `gp_const` also needs numpy and scipy. Every value here is computed independently of the Rust code
(arbitrary precision, direct formulas or mpmath quadrature).
"""
import sys

from mpmath import (
    mp, mpf, bernoulli, zeta, loggamma, digamma, gamma, euler, pi, sqrt, log,
    exp, quad, inf, fsum,
)

mp.dps = 50


def coeffs():
    print("// Stirling series: B_{2k} / (2k (2k-1)), k = 1..")
    for k in range(1, 11):
        c = bernoulli(2 * k) / (2 * k * (2 * k - 1))
        print(f"    {mp.nstr(c, 20, min_fixed=-100, max_fixed=100)},")
    print("// digamma asymptotic: B_{2k} / (2k), k = 1..")
    for k in range(1, 11):
        c = bernoulli(2 * k) / (2 * k)
        print(f"    {mp.nstr(c, 20, min_fixed=-100, max_fixed=100)},")
    print("// zeta(k), k = 2..=40")
    for k in range(2, 41):
        print(f"    {mp.nstr(zeta(k), 20)},")


def jeffreys_gev_xi(x):
    g = euler
    p = (1 + x) ** 2 * gamma(1 + 2 * x)
    q = gamma(2 + x) * (digamma(1 + x) + (1 + x) / x)
    a = 1 - 2 * gamma(2 + x) + p
    b = pi ** 2 / 6 + (1 - g + 1 / x) ** 2 - 2 * q / x + p / x ** 2
    c = 1 - g + 1 / x - gamma(2 + x) / x - q + p / x
    return sqrt(a * b - c * c) / x ** 2


def gp_pdf(z, s, xi):
    return (1 + xi * z / s) ** (-(1 + 1 / xi)) / s


def values():
    show = lambda name, v: print(f"{name} = {mp.nstr(v, 20)}")
    for x in ["0.001", "0.1", "0.5", "0.9999", "1.5", "2.0001", "3.7", "7.3", "25.5", "150", "1000"]:
        # at the double nearest x, which is what the test passes in
        show(f"lgamma({x})", loggamma(mpf(float(x))))
    for x in ["0.1", "1.4616321449683622", "5.5", "40"]:
        show(f"digamma({x})", digamma(mpf(x)))
    show("lambda", (pi ** 2 / 6 - euler) / 2)

    # Jeffreys GEV xi-component; the xi -> 0 limit needs extra digits.
    show("jeffreys_gev_xi(1)", jeffreys_gev_xi(mpf(1)))
    show("jeffreys_gev_xi(-0.3)", jeffreys_gev_xi(mpf("-0.3")))
    show("jeffreys_gev_xi(4)", jeffreys_gev_xi(mpf(4)))
    mp.dps = 200
    show("jeffreys_gev_xi(0)", jeffreys_gev_xi(mpf("1e-40")))
    mp.dps = 50

    # GEV log density at y=1, mu=0, sigma=2, xi=0.2.
    t = 1 + mpf("0.2") * mpf("0.5")
    show("gev_logpdf(1;0,2,0.2)", -log(2) - (1 + 1 / mpf("0.2")) * log(t) - t ** (-1 / mpf("0.2")))

    # E(Z^{-a/xi}) by quadrature of the density.
    for a, s, xi in [(2, 1, "-0.5"), (1, 3, "-0.25"), (1, 1, "-0.5"), (2, 1, "-1.25")]:
        xi = mpf(xi)
        r = -a / xi
        show(f"negpower(a={a},s={s},xi={xi})", quad(lambda z: z ** r * gp_pdf(z, s, xi), [0, -s / xi]))

    # Divergence lower bounds.
    show("mdi_gp_bound(m=2,zm=1,T=20)", quad(lambda v: v ** -2 * exp(v), [1, 20]) / 2)
    g = euler
    lam = (pi ** 2 / 6 - g) / 2
    A = pi ** 2 / 6 + (1 - g) ** 2
    c = (mpf(4) / 3) ** 4 * (A / sqrt(pi) - 1)
    n = 3
    Cn = mpf(n) ** -n * gamma(n) * gamma(n - 1) * (n - 1) ** (1 - n)
    show("jeffreys_gev_bound(n=3,d=1,T=30)",
         Cn * sqrt(c) * quad(lambda x: (1 + x) ** (2 - n + lam * x - g), [3, 30]))


def gp_sigma_integral(z, xi):
    z = [mpf(v) for v in z]
    xi, m = mpf(xi), len(z)
    lo = max(-xi * max(z), 0)
    f = lambda s: exp(fsum([-(1 + 1 / xi) * log(1 + xi * v / s) for v in z]) - (m + 1) * log(s))
    return log(quad(f, [lo, lo + 1, lo + 10, inf]))


def gev_location_scale_integral(y, xi):
    # r = distance from the support edge; r = t^4 near it absorbs the r^(-1-1/xi) singularity
    y = [mpf(v) for v in y]
    xi, n = mpf(xi), len(y)
    e = max(y) if xi < 0 else min(y)

    def R(r):
        if r <= 0:
            return mpf(0)
        a = [abs(xi) * (abs(e - v) + r) for v in y]
        S = fsum([ai ** (-1 / xi) for ai in a])
        return abs(xi) * gamma(n) * exp(fsum([-(1 + 1 / xi) * log(ai) for ai in a])) * S ** (-n)

    head = quad(lambda t: R(t ** 4) * 4 * t ** 3, [0, mpf("0.01"), mpf("0.1"), mpf("0.5"), 1])
    return log(head + quad(R, [1, 10, 100, inf]))


def integrals():
    mp.dps = 40
    show = lambda name, v: print(f"{name} = {mp.nstr(v, 20)}")
    show("ln_gp_sigma_integral([0.4,1.1,2.5], -3)", gp_sigma_integral([0.4, 1.1, 2.5], -3))
    for xi in ["-4", "-1.7"]:
        show(f"ln_gev_location_scale_integral([0,0.8,2.1], {xi})", gev_location_scale_integral([0, 0.8, 2.1], xi))


def gp_const():
    # Normalising constant of the Jeffreys GP posterior for z = [1, 2], in double
    # precision with scipy. For xi > 0 the sigma-integral is taken in u = xi/sigma = e^x
    # with the exact tail beyond x = 50, which generic quadrature under-resolves.
    import numpy as np
    from scipy.integrate import quad as squad

    z = np.array([1.0, 2.0])
    x0 = 50.0

    def h_pos(xi):
        e = 1.0 / xi
        f = lambda x: np.exp(2 * x - (1 + e) * (np.logaddexp(0, x) + np.logaddexp(0, x + np.log(2.0))))
        pts = [-80, -40, -20, -10, -5, 0, 5, 10, 20, 35, x0]
        body = sum(squad(f, a, b, epsabs=0, epsrel=1e-13, limit=500)[0] for a, b in zip(pts[:-1], pts[1:]))
        tail = 2.0 ** (-1 - e) * np.exp(-2 * e * x0) / (2 * e)
        return (body + tail) / xi ** 2

    def h_neg(xi):
        lo = -2 * xi

        def f(x):
            sig = lo + np.exp(x)
            s = -3 * np.log(sig)
            for zi in z:
                s += -(1 + 1 / xi) * np.log1p(xi * zi / sig)
            return np.exp(s + x)

        pts = [-60, -20, -5, 0, 5, 20, 40]
        return sum(squad(f, a, b, epsabs=0, epsrel=1e-12, limit=500)[0] for a, b in zip(pts[:-1], pts[1:]))

    prior = lambda xi: 1 / ((1 + xi) * np.sqrt(1 + 2 * xi))
    neg = squad(lambda xi: prior(xi) * h_neg(xi), -0.5, -1e-9, epsabs=0, epsrel=1e-11, limit=500)[0]
    spts = [-25, -10, -3, 0, 3, 10, 25]
    pos = sum(
        squad(lambda s: prior(np.exp(s)) * h_pos(np.exp(s)) * np.exp(s), a, b, epsabs=0, epsrel=1e-11, limit=500)[0]
        for a, b in zip(spts[:-1], spts[1:])
    )
    print(f"jeffreys_gp_const([1,2]) = {neg + pos!r}")
    print(f"sigma_integral([1,2], xi) for xi = 10, 100, 1000: {h_pos(10.0)!r} {h_pos(100.0)!r} {h_pos(1000.0)!r}")


if __name__ == "__main__":
    what = sys.argv[1] if len(sys.argv) > 1 else "values"
    {"coeffs": coeffs, "values": values, "integrals": integrals, "gp_const": gp_const}[what]()
