"""Grouping users onto resource blocks.

Thirty users around a point 200 m from the array share fifteen resource
blocks. Greedy placement is compared against random placement, for near-
and far-field channel knowledge.
"""

import numpy as np

from modxl import (CSI, BeamformerSpec, ScenarioConfig, Scheme, evaluate_grouping,
                   greedy_grouping, random_grouping, sample_scenario)

seeds = range(3)
for csi in CSI:
    spec = BeamformerSpec(Scheme.MMSE, csi)
    greedy, rand = [], []
    for seed in seeds:
        cfg = ScenarioConfig(seed=seed)
        channels, powers = sample_scenario(cfg), cfg.powers()
        greedy.append(greedy_grouping(channels, powers, cfg.Q, spec, seed).sum_rate)
        rand.append(evaluate_grouping(random_grouping(cfg.K, cfg.Q, seed),
                                      channels, powers, spec).sum_rate)
    print(f"{spec.label}: greedy {np.mean(greedy):6.1f}  random {np.mean(rand):6.1f} bps/Hz")

cfg = ScenarioConfig(seed=0)
res = greedy_grouping(sample_scenario(cfg), cfg.powers(), cfg.Q,
                      BeamformerSpec(), seed=0)
print("\nRB sizes with greedy placement:", sorted(len(g) for g in res.groups))
