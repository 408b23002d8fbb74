# # Eigenstate structure of the coupled molecule pair
#
# Two near-degenerate molecules exchange excitation through the near-field
# dipole-dipole coupling V12.  Depending on the ratio of the transition
# frequency difference D- to V12, the single-excitation eigenstates range
# from maximally entangled sub/superradiant pairs (D- = 0) to essentially
# the computational basis states (D-/V12 >> 1).

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dimergate import SystemParams, SweepSpec, dressed_coefficients, eigen_sweep

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# ## Coefficient maps vs the frequency difference
#
# At ell = 0 only the central {|01>, |10>} block mixes; the sweep reports
# the four coefficients of each of the four eigenstates.

base = SystemParams(delta_minus=0.0, delta_plus=0.0, v12=950.0, delta_eps=0.0,
                    ell1=0.0, ell2=0.0, gamma1=50.0, gamma2=50.0, gamma12=9.0)
table = eigen_sweep(SweepSpec(variable="delta_minus", start=-8000.0,
                              stop=8000.0, points=401, base=base))
x = table.rows[:, 0]

fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
for k, ax in enumerate(axes.flat, start=1):
    for label in ("a00", "a01", "a10", "a11"):
        ax.plot(x, table.column(f"{label}_{k}"), label=label)
    ax.axvline(2320.0, color="gray", lw=0.8)
    ax.set_title(f"eigenstate {k}")
    ax.set_ylabel("coefficient")
axes[1, 0].set_xlabel("delta_minus (MHz)")
axes[1, 1].set_xlabel("delta_minus (MHz)")
axes[0, 0].legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "eigen_vs_delta_minus.png", dpi=130)

# At the marked point D- = 2320 MHz with V12 = 950 MHz the central pair is
# split by about 3 GHz and partially entangled:

d = dressed_coefficients(2320.0, 950.0)
print(f"splitting X = {d.splitting:.2f} MHz, alpha1 = {d.alpha1:.4f}, "
      f"alpha2 = {d.alpha2:.4f}")

# ## Strong pumping mixes all four basis states
#
# With a strong drive (ell = 2000 MHz) every eigenstate acquires weight on
# all four basis states, so the pure sub/superradiant picture dissolves.

pumped = SystemParams(delta_minus=2320.0, delta_plus=0.0, v12=950.0,
                      delta_eps=0.0, ell1=2000.0, ell2=2000.0,
                      gamma1=50.0, gamma2=50.0, gamma12=9.0)
table2 = eigen_sweep(SweepSpec(variable="delta_plus_half", start=-8000.0,
                               stop=8000.0, points=401, base=pumped))
x2 = table2.rows[:, 0]

fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
for k, ax in enumerate(axes.flat, start=1):
    for label in ("a00", "a01", "a10", "a11"):
        ax.plot(x2, np.abs(table2.column(f"{label}_{k}")), label=label)
    ax.set_title(f"eigenstate {k} (|coefficient|)")
axes[1, 0].set_xlabel("delta_plus/2 (MHz)")
axes[1, 1].set_xlabel("delta_plus/2 (MHz)")
axes[0, 0].legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "eigen_vs_detuning_pumped.png", dpi=130)

print("wrote", OUT / "eigen_vs_delta_minus.png")
print("wrote", OUT / "eigen_vs_detuning_pumped.png")
