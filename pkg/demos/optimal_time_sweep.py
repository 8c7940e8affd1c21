"""Choosing the probing time: noise turns a monotone gain into a trade-off.

With the total acquisition time fixed, longer single-shot evolution buys
more phase per shot but costs repetitions (M = T / t) and, with noise,
coherence. Noiseless curves therefore improve all the way to the time
budget, while dephasing carves out an interior optimum t_opt. The sweep
returns the first interior dip of the bound curve; curves that run
monotone to an edge are flagged as boundary solutions instead.
"""

import numpy as np

from spinsense import (NoiseKind, SweepConfig, SweepScenario, TimeGrid,
                       sweep_time)

N = 20
GRID = TimeGrid(24, 0.05, 100.0)


def run(scenario, kind, gamma):
    cfg = SweepConfig(n_particles=N, scenario=scenario, kind=kind,
                      gamma=gamma, grid=GRID)
    return sweep_time(cfg)


# --- optimum vs noise kind and strength -----------------------------------

print(f"{'scenario':>9} {'kind':>13} {'gamma':>6} {'t_opt':>8} "
      f"{'i_min':>12} {'boundary':>9}")
table = [
    (SweepScenario.SIMULTANEOUS, NoiseKind.NONE, 0.0),
    (SweepScenario.SIMULTANEOUS, NoiseKind.MARKOVIAN, 0.05),
    (SweepScenario.SIMULTANEOUS, NoiseKind.NONMARKOVIAN, 0.05),
    (SweepScenario.SIMULTANEOUS, NoiseKind.MARKOVIAN, 0.1),
    (SweepScenario.INDIVIDUAL, NoiseKind.MARKOVIAN, 0.05),
    (SweepScenario.INDIVIDUAL, NoiseKind.NONMARKOVIAN, 0.05),
]
results = {}
for scenario, kind, gamma in table:
    res = run(scenario, kind, gamma)
    results[(scenario, kind, gamma)] = res
    print(f"{scenario.value:>9} {kind.value:>13} {gamma:6.2f} "
          f"{res.t_opt:8.3f} {res.i_min:12.4e} "
          f"{str(res.refinement.boundary):>9}")
print()
print("noiseless: more time per shot always wins, the optimum sits on the")
print("time budget; with noise the optimum moves inside, and doubling gamma")
print("halves t_opt; memoryful noise is gentler at short times, so its")
print("optimum sits later and lower")
print()

# --- the long-time tail of the individual curve ---------------------------

# past the dip the individual bound eventually starts falling again:
# dephasing empties the coherences the probe was prepared with, while a
# slow population rotation keeps accumulating information that only
# becomes usable at impractically long times (|phi| t of order pi). The
# sweep deliberately reports the first dip, not that far tail.
res = results[(SweepScenario.INDIVIDUAL, NoiseKind.MARKOVIAN, 0.05)]
ts = res.times[np.isfinite(res.bounds)]
bs = res.bounds[np.isfinite(res.bounds)]
rows = np.linspace(0, len(ts) - 1, 9).astype(int)
nearest = rows[np.argmin(np.abs(np.log(ts[rows]) - np.log(res.t_opt)))]
print(f"{'t':>9} {'I_ind':>12}")
for i in rows:
    marker = "  <- dip reported as t_opt" if i == nearest else ""
    print(f"{ts[i]:9.3f} {bs[i]:12.4e}{marker}")
