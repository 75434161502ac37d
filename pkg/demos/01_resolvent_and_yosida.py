"""Resolvents, Yosida maps and the comonotone modulus on a small example.

Run with ``python demos/01_resolvent_and_yosida.py``.
"""

# %%
# A scaled rotation with negative real part is not monotone: <x, Ax> < 0
# for every x != 0.  It is still comonotone with a negative modulus.
import numpy as np

from comonotone import DenseLinearOperator, comonotone_modulus, property_suite

A = np.array([[-0.4, 0.8], [-0.8, -0.4]])
print("modulus:", comonotone_modulus(A))   # -0.5
op = DenseLinearOperator(A, zero=[0.0, 0.0])

# %%
# The resolvent index has to exceed -2*rho = 1.  At eta = 2 the resolvent
# is a 2x2 solve; (1, 0) maps to (1/13, 8/13).
eta = 2.0
print("J(1,0)   =", op.resolvent(eta, [1.0, 0.0]), "vs", np.array([1, 8]) / 13)
print("A_eta(1,0) =", op.yosida(eta, [1.0, 0.0]), "vs", np.array([6, -4]) / 13)

# %%
# Below the admissible range the operator refuses to build the resolvent.
try:
    op.resolvent(0.9, [1.0, 0.0])
except ValueError as exc:
    print("refused:", exc)

# %%
# The Yosida map is (rho+eta)-cocoercive, J_eta is averaged and the pair
# (J_eta x, A_eta x) sits on the graph of A.  Each is sampled 1000 times.
for report in property_suite(op, eta):
    print(report)
