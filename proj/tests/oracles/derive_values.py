"""Independent derivation of the frozen values used by the C++ unit tests.

Every quantity here comes from adaptive quadrature (mpmath.quad) of the raw
drift formulas plus numerical differentiation (mpmath.diff); no closed-form
antiderivative is used. Run with `python3 derive_values.py`.
"""
import mpmath as mp

mp.mp.dps = 30
P = 2 * mp.pi


def hh_drift(theta, x):
    x1, x2, x3, x4 = x
    u = x1 * mp.cos(theta) + x3 * mp.sin(theta)
    return [2 * mp.sin(theta) * u * x2,
            x4,
            -2 * mp.cos(theta) * u * x2,
            -2 * u ** 2 + x2 ** 2 - x2]


def hh_avg(x):
    return [mp.quad(lambda t: hh_drift(t, x)[i], [0, mp.pi, P]) / P for i in range(4)]


def hh_F(theta, x, i):
    avg = hh_avg(x)[i]
    return mp.quad(lambda t: hh_drift(t, x)[i] - avg, [0, theta])


def hh_F_vec(theta, x):
    return [hh_F(theta, x, i) for i in range(4)]


def jac(theta, x):
    out = []
    for i in range(4):
        row = []
        for j in range(4):
            def g(s, j=j):
                y = list(x)
                y[j] = y[j] + s
                return hh_F(theta, y, i)
            row.append(mp.diff(g, 0))
        out.append(row)
    return out


def hess_contract(theta, x, v):
    # d^2/ds^2 F(x + s v) at s=0 equals F''(x)(v, v).
    return [mp.diff(lambda s: hh_F(theta, [x[k] + s * v[k] for k in range(4)], i), 0, 2)
            for i in range(4)]


def fmt(v):
    return "{" + ", ".join(mp.nstr(c, 17) for c in v) + "}"


print("avg(1,1,1,1) =", fmt(hh_avg([1, 1, 1, 1])))
print("F(2pi,(0.7)^4) =", fmt(hh_F_vec(P, [mp.mpf("0.7")] * 4)))
J = jac(mp.pi / 2, [1, 1, 1, 1])
for r in J:
    print("J(pi/2,1)", fmt(r))

xp = [mp.mpf("0.7"), mp.mpf("-0.3"), mp.mpf("1.1"), mp.mpf("0.4")]
sig = [0, 0, mp.mpf("0.2") * xp[0], mp.mpf("0.2") * xp[1]]
print("F''(1.0, xp)(sig, sig) =", fmt(hess_contract(mp.mpf(1), xp, sig)))

# One micro-macro step for Henon-Heiles, multiplicative noise 0.2(0,0,X1,X2).
eps = mp.mpf(1) / 16
t_n = mp.mpf("0.3")
h = mp.mpf("0.5")
xi = mp.mpf(0)
xb = [mp.mpf("0.7")] * 4
y = [mp.mpf("0.01"), mp.mpf("-0.02"), mp.mpf("0.03"), mp.mpf("-0.04")]
theta = t_n / eps


def sigma(x):
    return [0, 0, mp.mpf("0.2") * x[0], mp.mpf("0.2") * x[1]]


avg = hh_avg(xb)
Fv = hh_F_vec(theta, xb)
Jm = jac(theta, xb)
sb = sigma(xb)
Hss = hess_contract(theta, xb, sb)
phi = [xb[i] + eps * Fv[i] for i in range(4)]
z = [phi[i] + y[i] for i in range(4)]
fz = hh_drift(theta, z)
fx = hh_drift(theta, xb)
sz = sigma(z)
Javg = [sum(Jm[i][j] * avg[j] for j in range(4)) for i in range(4)]
Jsig = [sum(Jm[i][j] * sb[j] for j in range(4)) for i in range(4)]
macro = [xb[i] + h * avg[i] + mp.sqrt(h) * sb[i] * xi for i in range(4)]
micro = [y[i] + h * (fz[i] - fx[i]) - eps * h * (Javg[i] + Hss[i] / 2)
         + mp.sqrt(h) * (sz[i] - sb[i] - eps * Jsig[i]) * xi for i in range(4)]
print("mm step macro =", fmt(macro))
print("mm step micro =", fmt(micro))

# Same step with xi = 0.8 to exercise the noise bracket.
xi = mp.mpf("0.8")
macro = [xb[i] + h * avg[i] + mp.sqrt(h) * sb[i] * xi for i in range(4)]
micro = [y[i] + h * (fz[i] - fx[i]) - eps * h * (Javg[i] + Hss[i] / 2)
         + mp.sqrt(h) * (sz[i] - sb[i] - eps * Jsig[i]) * xi for i in range(4)]
print("mm step xi=0.8 macro =", fmt(macro))
print("mm step xi=0.8 micro =", fmt(micro))
