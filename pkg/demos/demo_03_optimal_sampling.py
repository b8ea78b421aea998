"""
Spending a sampling budget well
===============================

With a budget of half a sample per slot, random sampling can do no better
than sampling with probability 0.5 every slot.  Modified random sampling
only considers a sample when the source disagrees with the receiver, and
can choose different probabilities while in sync (q1) and while in error
(q2).
"""

from semvia.model import ChannelParams, SourceParams
from semvia.optimizer import CostBudget, q_star_equal, solve_mrsc, solve_rsc

budget = CostBudget.from_eta(0.5)

# %%
# Sweep the 0 -> 1 transition probability for a source that leaves state 1
# quickly (q = 0.8) over a good and a poor channel.
for ps in (0.9, 0.1):
    ch = ChannelParams(ps)
    print(f"\np_s = {ps}")
    print("   p   RSC AoII   q1*    q2*   MRSC AoII  equal q*")
    for p in (0.1, 0.3, 0.5, 0.7, 0.9):
        src = SourceParams(p, 0.8)
        r = solve_rsc("aoii", src, ch, budget)
        m = solve_mrsc("aoii", src, ch, budget)
        print(f" {p:.1f}  {r.objective_value:8.4f}  {m.params['q1']:.3f}  {m.params['q2']:.3f}  "
              f"{m.objective_value:9.4f}  {q_star_equal(src, ch, 0.5):.3f}")

# %%
# On the poor channel with a slowly changing source the best choice is to
# never sample while in sync and always sample while in error.  As the
# source speeds up, sampling in sync pays off again and q1 jumps.  With a
# good channel the optimum rides the cost boundary at q2 = 1.
