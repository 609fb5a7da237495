r"""
Conditioning of the Space-Time Operators
========================================
Spectral collocation matrices are dense and grow badly conditioned with
the degree. This demo measures how the 2-norm condition number of the
space-time wave operator, and of the time-derivative block used to recover
the magnetic field, grows with N.
"""
#%%
# The time block
# --------------
# :math:`\langle S_t\rangle` is the Chebyshev time-derivative matrix with
# the row and column of the initial node removed. Its eigenvalues lie in
# the right half plane, so every time solve is well posed.
import numpy as np

from stmaxwell.verify import condition_number, fit_loglog_slope, min_real_eig_time

for n in (4, 8, 16, 32):
    print(f"N={n:2d}  min Re(lambda) = {min_real_eig_time(n):.3f}")

#%%
# Growth with N
# -------------
# The wave operator is a Kronecker sum, so its extreme singular values can
# be found by Lanczos iterations that only apply the operator and its fast
# inverse. A log-log fit gives the growth exponent.
ns = [4, 6, 8, 10, 12]
k_lap = [condition_number("a_lap", n) for n in ns]
k_t = [condition_number("s_t_int", n) for n in ns]
for n, a, b in zip(ns, k_lap, k_t):
    print(f"N={n:2d}  kappa(A_wave) = {a:10.3e}   kappa(<S_t>) = {b:9.3e}")
print(f"slopes: wave {fit_loglog_slope(ns, k_lap):.2f}, time block {fit_loglog_slope(ns, k_t):.2f}")

#%%
# The ratio of extreme eigenvalue moduli grows much more slowly than the
# singular-value ratio. Both matrices are far from normal, and the
# eigenvalue ratio misses the growth that actually limits accuracy.
k_eig = [condition_number("a_lap", n, "eig") for n in ns]
print(f"eigenvalue-ratio slope for the wave operator: {fit_loglog_slope(ns, k_eig):.2f}")

try:
    import matplotlib.pyplot as plt
except ImportError:  # plotting is optional
    plt = None

if plt is not None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog(ns, k_lap, "o-", label="wave operator, 2-norm")
    ax.loglog(ns, k_eig, "o--", label="wave operator, eigenvalues")
    ax.loglog(ns, k_t, "s-", label=r"$\langle S_t\rangle$, 2-norm")
    ax.set_xlabel("N")
    ax.legend()
    fig.tight_layout()
    plt.show()
