"""Symbolic oracle for the manufactured-solution source terms.

Differentiates the closed-form fields with sympy and evaluates the residual of
each equation at seeded random space-time points.  The printed table is frozen
into tests/mms_oracle.rs.
"""
import random

import sympy as sp

x, t = sp.symbols("x t", real=True)
A, L = sp.Rational(1, 10), sp.Integer(16)
k = sp.pi / L
lb = L / 6
m = L / 2

v = 1 + A * sp.sin(k * x) * sp.exp(-t)
u = A * sp.sin(k * x) * sp.exp(-t)
th = 1 + A * sp.cos(k * x) * (1 - sp.exp(-t)) * sp.exp(-(x / lb) ** 2)
ph = sp.tanh(x / 2 * (1 + (x / m) ** 2))


def sources(eps, beta, nu, R, cv, kap):
    px = sp.diff(ph, x)
    mu = (ph**3 - ph) / eps - eps * sp.diff(px / v, x)
    ux = sp.diff(u, x)
    s_v = sp.diff(v, t) - ux
    s_u = sp.diff(u, t) - (
        -sp.diff(R * th / v + eps / 2 * px**2 / v**2, x) + nu * sp.diff(ux / v, x)
    )
    s_phi = sp.diff(ph, t) + v * mu
    s_th = sp.diff(th, t) - (
        -(R * th / v) * ux
        + kap * sp.diff(th**beta * sp.diff(th, x) / v, x)
        + nu * ux**2 / v
        + v * mu**2
    ) / cv
    return [sp.lambdify((x, t), e, "mpmath") for e in (s_v, s_u, s_th, s_phi)]


sets = {
    "default": (1, 1, 1, 1, 1, 1),
    "general": (
        sp.Rational(1, 2),
        2,
        sp.Rational(13, 10),
        sp.Rational(4, 5),
        sp.Rational(17, 10),
        sp.Rational(9, 10),
    ),
}

rng = random.Random(20240611)
pts = [(rng.uniform(-16, 16), rng.uniform(0, 1)) for _ in range(20)]
import mpmath

mpmath.mp.dps = 30
for name, p in sets.items():
    fs = sources(*p)
    print(f"// {name}")
    for xx, tt in pts:
        vals = [float(f(mpmath.mpf(xx), mpmath.mpf(tt))) for f in fs]
        print(f"    ({xx!r}, {tt!r}, [{', '.join(repr(v) for v in vals)}]),")
