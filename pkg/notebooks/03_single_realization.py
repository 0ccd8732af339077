# %% [markdown]
# # One realization: stepwise, exhaustive and random selection
#
# On a small array the exhaustive search is affordable, so the greedy
# result can be compared with the true optimum.

# %%
import numpy as np

from wiretap_tas import SelectorConfig, SystemParams, generate_channels
from wiretap_tas import run_exhaustive, run_random, run_stepwise

rng = np.random.default_rng(2)
params = SystemParams(m_antennas=10, k_users=2, n_eve=2, l_max=4)
channels = generate_channels(10, 2, 2, rng)

# %%
trace = run_stepwise(channels, params)
for r in trace.steps:
    print(r)
print("stop:", trace.stop_reason, " rate:", round(trace.rate, 4))

# %%
no_stc = run_stepwise(channels, params, SelectorConfig(enforce_stc=False))
best = run_exhaustive(channels, params)
rand = np.mean([run_random(channels, params, 4, rng).rate for _ in range(200)])
print(f"stepwise with STC    {trace.rate:.4f}  L={trace.size}")
print(f"stepwise without STC {no_stc.rate:.4f}  L={no_stc.size}")
print(f"exhaustive           {best.rate:.4f}  subset={best.selection}")
print(f"random (mean of 200) {rand:.4f}")
