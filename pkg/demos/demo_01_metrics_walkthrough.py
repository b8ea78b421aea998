"""
How the three ages evolve slot by slot
======================================

A binary source flips between 0 and 1.  The receiver holds a reconstruction
that only changes when a sample gets through the erasure channel.  Three
counters describe how stale the receiver is:

* VIA counts source changes missed since the last delivery.
* AoIV counts changes missed while the receiver is wrong (0 or 1 here).
* AoII counts consecutive slots spent wrong.
"""

from semvia.metrics import WORKED_OUTCOMES, replay
from semvia.model import ChannelParams, SourceParams
from semvia.policies import RS
from semvia import sim

# %%
# Replay a short hand-built history.  Each entry is (source value, sampled,
# delivered) for slots 2, 3, ...
states = replay(WORKED_OUTCOMES)
print(" t  X  Xhat  VIA  AoIV  AoII")
for t, s in enumerate(states, start=1):
    print(f"{t:2d}  {s.x}  {s.xhat:4d}  {s.via:3d}  {s.aoiv:4d}  {s.aoii:4d}")

# %%
# The same recursions drive the simulator.  A per-slot trace of random
# sampling shows AoII growing during error runs while AoIV never exceeds 1.
cfg = sim.SimConfig(SourceParams(0.3, 0.4), ChannelParams(0.6), RS(0.5), horizon=1000, seed=7)
for row in sim.trace(cfg, slots=15):
    print(row)

# %%
# Long-run averages come from the compiled kernel, with batch-means errors.
summary = sim.run(sim.SimConfig(SourceParams(0.3, 0.4), ChannelParams(0.6), RS(0.5), horizon=10**6, seed=7))
for m in sim.METRICS:
    print(f"{m:14s} {getattr(summary, m):.5f} +/- {summary.stderr[m]:.5f}")
