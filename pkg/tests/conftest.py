import numpy as np
import pytest
import sympy as sp

from affine_algebroid.geometry import Box, MetricField

T, X, Y, Z = sp.symbols("t x y z", real=True)
COORDS = (T, X, Y, Z)


def symbolic_curvature(g):
    """Christoffel, Riemann R^l_{kij}, Ricci and scalar of a sympy metric."""
    ginv = g.inv()
    n = 4
    Gam = [[[sum(ginv[k, m] * (sp.diff(g[m, i], COORDS[j]) + sp.diff(g[m, j], COORDS[i])
                               - sp.diff(g[i, j], COORDS[m])) for m in range(n)) / 2
             for j in range(n)] for i in range(n)] for k in range(n)]

    def riem(l, k, i, j):
        expr = sp.diff(Gam[l][j][k], COORDS[i]) - sp.diff(Gam[l][i][k], COORDS[j])
        expr += sum(Gam[l][i][m] * Gam[m][j][k] - Gam[l][j][m] * Gam[m][i][k] for m in range(n))
        return expr

    R = [[[[riem(l, k, i, j) for j in range(n)] for i in range(n)] for k in range(n)]
         for l in range(n)]
    ric = sp.Matrix(n, n, lambda k, j: sum(R[l][k][l][j] for l in range(n)))
    scal = sum(ginv[i, j] * ric[i, j] for i in range(n) for j in range(n))
    return Gam, R, ric, scal


def lambdify4(expr):
    f = sp.lambdify(COORDS, expr, "numpy")
    return lambda x: np.asarray(f(*x), dtype=float)


@pytest.fixture(scope="session")
def sympy_metric():
    """Small polynomial metric with symbolic oracles for Γ, Riemann, Ricci and R."""
    eps = sp.Rational(1, 10)
    # two coupled 2x2 blocks keep the symbolic inverse small; entries still depend on all coordinates
    g = sp.zeros(4, 4)
    g[:2, :2] = sp.Matrix([[-1 + eps * X * Y, eps * T * Z], [eps * T * Z, 1 + eps * Y ** 2]])
    g[2:, 2:] = sp.Matrix([[1 + eps * Z * X, eps * Y], [eps * Y, 1 + eps * T * Y * Z]])
    Gam, R, ric, scal = symbolic_curvature(g)
    gf = MetricField(lambdify4(g), Box(np.full(4, -1.0), np.full(4, 1.0)), "sympy_poly")
    return {
        "gf": gf,
        "g_sym": g,
        "gamma_sym": Gam,
        "gamma": lambdify4(sp.Array(Gam)),
        "riemann": lambdify4(sp.Array(R)),
        "ricci": lambdify4(ric),
        "scalar": lambdify4(scal),
    }


@pytest.fixture(scope="session")
def sympy_em(sympy_metric):
    """Symbolic F, tr(F∘F) and div F for a polynomial potential on the sympy metric."""
    g = sympy_metric["g_sym"]
    ginv = g.inv()
    A = sp.Matrix([sp.Rational(3, 10) * X * Y, sp.Rational(1, 5) * T * Z,
                   sp.Rational(1, 10) * X ** 2, sp.Rational(1, 4) * Y * Z + T / 10])
    Al = g * A
    F02 = sp.Matrix(4, 4, lambda i, j: (sp.diff(Al[j], COORDS[i]) - sp.diff(Al[i], COORDS[j])) / 2)
    F11 = ginv * F02.T
    Gam = sympy_metric["gamma_sym"]
    nabla = [[[sp.diff(F11[i, j], COORDS[k])
               + sum(Gam[i][k][m] * F11[m, j] - Gam[m][k][j] * F11[i, m] for m in range(4))
               for j in range(4)] for i in range(4)] for k in range(4)]
    div = [sum(ginv[k, j] * nabla[k][i][j] for k in range(4) for j in range(4)) for i in range(4)]
    return {
        "A": lambdify4(list(A)),
        "F02": lambdify4(F02),
        "F11": lambdify4(F11),
        "trFF": lambdify4((F11 * F11).trace()),
        "divF": lambdify4(sp.Array(div)),
    }
