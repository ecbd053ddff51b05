"""High-precision reference values frozen into the Rust test suite.

Run with `python3 oracle_values.py`; requires mpmath. Every number printed
here is pasted verbatim into tests/oracles.rs. The evaluations below go
straight through the closed-form expressions with 50-digit arithmetic and
share no code with the crate.
"""

import mpmath as mp

mp.mp.dps = 50

HBAR = mp.mpf("1.054571817e-34")
C = mp.mpf("299792458")
EV = mp.mpf("1.602176634e-19")
HBAR_C = HBAR * C / EV  # eV*m


def k1_values():
    print("# K1(x) reference values")
    for x in ["1e-8", "1e-6", "1e-3", "0.1", "0.5", "1", "1.999", "2", "2.001",
              "5", "10", "30", "100", "300", "700"]:
        print(x, mp.nstr(mp.besselk(1, mp.mpf(x)), 20))


def sideband():
    print("# a_plus at delta = omega_m, nominal parameters")
    wm = mp.mpf(1e5)
    w0 = mp.mpf(1e5)
    gam = w0 / mp.mpf(3e12)
    kap = mp.mpf(1e6)
    det = mp.mpf(0)
    g = mp.mpf(200)
    epu = mp.mpf(1e3)
    epr = mp.mpf(100)
    alpha = 2 * g**2 / wm
    sigma = mp.findroot(lambda s: (kap**2 + (det - alpha * s) ** 2) * s - epu**2,
                        epu**2 / kap**2)
    print("sigma", mp.nstr(sigma, 25))
    for d in [wm, wm + mp.mpf("1e-8"), wm - mp.mpf("2.5e-8"), wm + 3]:
        k1 = wm**2 - 1j * d * gam - d**2
        k2 = -kap + 1j * d + 1j * det - 2j * g**2 * sigma / wm
        k3 = kap - 1j * d + 1j * det - 2j * g**2 * sigma / wm
        k4 = 2 * g**2 * sigma * wm
        ap = epr * k1 * (k1 * k2 - 1j * k4) / ((k1 * k3 - 1j * k4) * (k1 * k2 - 1j * k4) + k4**2)
        t = 1 - 2 * kap * ap / epr
        print("delta-wm", mp.nstr(d - wm, 5), "re", mp.nstr(ap.real, 20), "im",
              mp.nstr(ap.imag, 20), "|t|^2", mp.nstr(abs(t) ** 2, 20))


def phi_values():
    print("# Phi(r, z) direct evaluation")
    for r, z in [("0.05", "1e-3"), ("1", "5e-5"), ("2", "0.25"), ("0.05", "1e-9")]:
        r = mp.mpf(r)
        z = mp.mpf(z)
        v = r - 1 / (2 * z) + mp.exp(-2 * r * z) * (r + 1 / (2 * z))
        print(mp.nstr(r, 5), mp.nstr(z, 5), "y", mp.nstr(2 * r * z, 5), mp.nstr(v, 20))


def integral_values():
    print("# I(m_a) for the default geometry (R=10nm, D=100um, d=500nm)")
    R = mp.mpf("10e-9") / HBAR_C
    D = mp.mpf("100e-6") / HBAR_C
    d = mp.mpf("500e-9") / HBAR_C

    def phi(r, z):
        y = 2 * r * z
        return r - 1 / (2 * z) + mp.exp(-y) * (r + 1 / (2 * z))

    for ma in ["1e-10", "1e-3", "0.1", "1", "20"]:
        ma = mp.mpf(ma)

        # u = cosh(theta) removes the square-root edge; split the theta axis
        # at the scales set by the two exponentials.
        def f(th):
            u = mp.cosh(th)
            return mp.tanh(th) ** 2 * (1 - mp.exp(-2 * ma * u * D)) * mp.exp(-2 * ma * d * u) * phi(R, ma * u)

        eps = 2 * ma * d
        top = mp.acosh(max(mp.mpf(2), 1 + 120 / eps))
        pts = [mp.mpf(0)]
        for s in [1 / (2 * ma * D), 1 / eps]:
            if s > 1:
                pts.append(mp.acosh(s))
        pts.append(top)
        pts = sorted(set(pts))
        fine = [pts[0]]
        for a, b in zip(pts[:-1], pts[1:]):
            n = 16
            for k in range(1, n + 1):
                fine.append(a + (b - a) * k / n)
        val = mp.quad(f, fine)
        print(mp.nstr(ma, 5), mp.nstr(val, 20))
    print("R*ln(1+D/d) (m_a -> 0, Phi -> R)", mp.nstr(R * mp.log(1 + D / d), 20))


if __name__ == "__main__":
    k1_values()
    sideband()
    phi_values()
    integral_values()
