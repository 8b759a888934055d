"""Regenerate src/surfstokes/_polynomial_case.py.

Derives the surface Stokes data for u_T = P w, p = x1 x2 x3 on a sphere of
radius R, with w = (x2 x3, -x1 x3, x1^2 - x2^2).  Ambient fields built from
x/|x| agree with the surface fields on the sphere, and only tangential
derivatives are taken, so the results are exact on the surface.  |x| is kept
as a separate symbol r with d r / d x_i = x_i / r, which keeps every
expression a Laurent polynomial and avoids costly simplification.  Requires
sympy (development only).

    python tools/derive_mms.py > src/surfstokes/_polynomial_case.py
"""
import sympy as sy

x1, x2, x3 = sy.symbols("x1 x2 x3", real=True)
r, R = sy.symbols("r R", positive=True)
X = [x1, x2, x3]


def d(e, i):
    return sy.expand(sy.diff(e, X[i]) + sy.diff(e, r) * X[i] / r)


n = sy.Matrix(X) / r
P = sy.eye(3) - n * n.T
w = sy.Matrix([x2 * x3, -x1 * x3, x1**2 - x2**2])
p = x1 * x2 * x3

U = (P * w).applyfunc(sy.expand)
gradU = sy.Matrix(3, 3, lambda i, j: d(U[i], j))
PgP = (P * gradU * P).applyfunc(sy.expand)
strain = ((PgP + PgP.T) / 2).applyfunc(sy.expand)
div_strain = sy.Matrix(
    [sy.expand(sum(P[k, j] * d(strain[i, j], k) for j in range(3) for k in range(3)))
     for i in range(3)]
)
grad_p = P * sy.Matrix([d(p, i) for i in range(3)])
forcing = -P * div_strain + U + grad_p
source = (gradU * P).trace()
vel_grad = gradU * P


def on_sphere(e):
    return sy.expand(sy.expand(e).subs(r, R))


outputs = {
    "velocity": [on_sphere(U[i]) for i in range(3)],
    "velocity_gradient": [on_sphere(vel_grad[i, j]) for i in range(3) for j in range(3)],
    "forcing": [on_sphere(forcing[i]) for i in range(3)],
    "source": [on_sphere(source)],
}

print('"""Generated by tools/derive_mms.py; do not edit.')
print()
print("Closed forms on the sphere |x| = R for u_T = P w, w = (x2 x3, -x1 x3, x1^2 - x2^2),")
print('p = x1 x2 x3.  Inputs are arrays of surface points (..., 3)."""')
print("import numpy as np")
print()
for name, exprs in outputs.items():
    print()
    print(f"def {name}(y, R):")
    print("    x1, x2, x3 = y[..., 0], y[..., 1], y[..., 2]")
    subs, reduced = sy.cse(exprs, symbols=sy.numbered_symbols("t"))
    for s, e in subs:
        print(f"    {s} = {sy.pycode(e)}")
    items = [sy.pycode(e) for e in reduced]
    if name == "source":
        print(f"    return {items[0]} + 0.0 * x1")
    elif name == "velocity_gradient":
        print("    out = np.stack([" + ", ".join(f"{it} + 0.0 * x1" for it in items) + "], axis=-1)")
        print("    return out.reshape(y.shape[:-1] + (3, 3))")
    else:
        print("    return np.stack([" + ", ".join(f"{it} + 0.0 * x1" for it in items) + "], axis=-1)")
