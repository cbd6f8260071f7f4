# %% [markdown]
# # Per-user rate and cell throughput
#
# The rate integral of the coverage curve, `int P(T) / (1 + T) dT`, is the
# mean of `ln(1 + SIR)`, so it comes out in nats. A coherence block of `L`
# uses spends `K` on pilots, and the cell throughput `K (L - K) rate / L`
# peaks at `K = L // 2`.

# %%
import math

import numpy as np

from mimocov import SimConfig, reproduce_table1
from mimocov.monte_carlo import simulate_sirs

t = reproduce_table1(SimConfig(alpha=4.0, L=16))
print(f"{'':28s} {'nats':>8} {'bps/Hz':>8}")
print(f"{'massive MIMO, per user':28s} {t.rate_per_user_nats:8.4f} {t.rate_per_user:8.4f}")
print(f"{'single antenna, per user':28s} {t.baseline_rate_nats:8.4f} {t.baseline_rate:8.4f}")
print(f"{'massive MIMO, cell (K=%d)' % t.k_opt:28s} {t.sum_rate_per_cell_nats:8.4f} {t.sum_rate_per_cell:8.4f}")

# %% [markdown]
# A direct Monte Carlo mean of `log2(1 + SIR)` confirms which unit each
# number is in.

# %%
sirs, _ = simulate_sirs(SimConfig(n_samples=20_000, seed=5))
v = np.log2(1 + sirs)
print(f"MC E[log2(1+SIR)] = {v.mean():.3f} +- {v.std() / math.sqrt(len(v)):.3f} bps/Hz")
