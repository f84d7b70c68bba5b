"""Exact values for the worked family (seed type I, alpha=3, beta=0, m=1).

Everything here is computed symbolically, independent of the package, and
printed; the numbers frozen into the tests come from this script.
"""

import sympy as sp

x, t = sp.symbols("x theta", real=True)
al, be, m = 3, 0, 1

P = sp.jacobi(m, -al, be, x)
phi = (1 - x) ** (-al) * P
w = sp.simplify(sp.diff(phi, x) / phi)
b = sp.expand(-(1 - x) * P)  # sign flipped so that b_tilde > 0
bw = sp.simplify(b * w)
bt = sp.cancel(b / (1 - x))
p, q = 1 - x**2, be - al - (al + be + 2) * x
lam = sp.simplify(p * (sp.diff(w, x) + w**2) + q * w)
print("P_1^(-3,0) =", sp.expand(P))
print("b =", sp.factor(b), " b_tilde =", bt, " bw =", sp.expand(bw))
print("lambda_tilde =", lam)

W = (1 - x) ** (al - 1) * (1 + x) ** (be + 1) / bt**2
print("W(0) =", W.subs(x, 0))

rho = [sp.sqrt(sp.integrate(sp.jacobi(k, al, be, x) ** 2 * (1 - x) ** al * (1 + x) ** be, (x, -1, 1)))
       for k in range(4)]
print("rho_0 =", rho[0])
for k in range(4):
    pk = sp.jacobi(k, al, be, x) / rho[k]
    Pk = sp.simplify(b * sp.diff(pk, x) - bw * pk)
    if k == 0:
        print("P_0^[1] =", sp.expand(Pk), " at x=1:", Pk.subs(x, 1))
    nrm = sp.integrate(sp.cancel(Pk**2 * (1 - x) ** 2 * (1 + x) / bt**2 * bt**2) / bt**2, (x, -1, 1))
    print(f"||P_{k}^[1]||^2 =", sp.nsimplify(sp.simplify(nrm)))

Q0 = sp.integrate(bt, (x, 0, x))
print("Q0 =", sp.expand(Q0), " Q0(1) =", Q0.subs(x, 1), " Q0(-1) =", Q0.subs(x, -1))
Qc = sp.expand(sp.expand_trig(Q0.subs(x, sp.cos(t))))
U = [sp.integrate(Qc * sp.cos(j * t), (t, 0, sp.pi)) / sp.pi for j in range(4)]
print("U_j from cosine expansion:", U)
print("interval:", 2 * (-U[1] + U[2]), 2 * (U[1] + U[2]))
print("arcsine int Q0^2:", sp.integrate(Q0**2 / (sp.pi * sp.sqrt(1 - x**2)), (x, -1, 1)))

# Legendre-weight recurrence and a 3x3 determinant used by the tests
print("Legendre a_1 =", sp.sqrt(sp.integrate(x**2, (x, -1, 1)) / 2))
b1 = sp.cancel(b / (1 - x))
print("b1(1) =", b1.subs(x, 1), " Mehler-Heine constant -b1(1)/Gamma(alpha) =", -b1.subs(x, 1) / sp.gamma(al))
