# %% [markdown]
# # Secrecy rates for a fixed antenna subset
#
# Draw one Rayleigh realization, pick a subset of antennas, and look at how
# the per-user and weighted secrecy rates change with transmit power.

# %%
import numpy as np

from wiretap_tas import SystemParams, generate_channels, mrt_precoder, secrecy_rate, select_rows

rng = np.random.default_rng(0)
params = SystemParams.paper_setting(l_max=16)
channels = generate_channels(64, 4, 8, rng)

# %% [markdown]
# MRT on the first 16 antennas. The precoder always has unit Frobenius norm.

# %%
subset = list(range(16))
h_eff = select_rows(channels.h_main, subset)
g_eff = select_rows(channels.g_eve, subset)
precoder = mrt_precoder(h_eff)
print("trace(W W^H) =", precoder.power)

# %%
for p in (0.01, 0.1, 0.5, 1.0):
    rep = secrecy_rate(h_eff, g_eff, precoder, p, params, selection=subset)
    print(f"P={p:5.2f}  per-user {np.round(rep.per_user_secrecy, 3)}  "
          f"weighted {rep.weighted_avg:.3f} bits")

# %% [markdown]
# Users whose leakage exceeds their own rate are clipped to zero; the
# unclipped difference is kept in `per_user_unclipped`.

# %%
rep = secrecy_rate(h_eff, g_eff, precoder, 1.0, params)
print(np.round(rep.per_user_unclipped, 3))
