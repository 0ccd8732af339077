# %% [markdown]
# # Incremental growth terms
#
# Adding one antenna to an MRT selection changes every SINR by a
# multiplicative factor. The engine computes these factors from cached
# cross-products in O(K^2 + KN) per candidate; here we compare them with a
# rebuild from scratch.

# %%
import numpy as np

from wiretap_tas import eval_candidate, extend_state, generate_channels, init_state
from wiretap_tas.metrics import terms_for_selection, user_log_ratios

rng = np.random.default_rng(1)
channels = generate_channels(12, 3, 2, rng)
w = np.full(3, 1 / 3)
p, s2 = 0.5, 0.1

state = init_state(channels, 0, p)
for i in (4, 7):
    state = extend_state(state, i)
print("selected:", state.selection, " beta:", round(state.beta, 4))

# %%
before = user_log_ratios(state.sinr_terms, p, s2, s2) @ w
for cand in (1, 2, 3):
    ev = eval_candidate(state, cand, p, w, s2, s2)
    after = user_log_ratios(terms_for_selection(channels, state.selection + (cand,)), p, s2, s2) @ w
    print(f"antenna {cand}: growth {ev.growth:+.6f}  scratch {after - before:+.6f}  "
          f"alpha^2 {ev.alpha2:.4f}")
