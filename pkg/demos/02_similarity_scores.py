"""From poselines to a single similarity number.

Shows the distance between individual poselines, the greedy bipartite
matching (including the case where greedy is provably suboptimal), and
the hit-ratio / normalized-mean-distance / combined-ratio summary.
"""

import numpy as np

from compcanvas import greedy_bipartite_match, poseline_distance, summarize
from compcanvas.similarity import greedy_match_matrix

# two poselines offset by the 3-4-5 triangle: distance is exactly 5
a = ((0.0, 0.0), (0.0, 100.0))
b = ((3.0, 4.0), (3.0, 104.0))
print(f"single poseline distance: {poseline_distance(a, b)}")

# a query with 3 poselines vs a target with 4
rng = np.random.default_rng(0)
query = [((x, 100.0), (x, 400.0)) for x in (200.0, 500.0, 800.0)]
target = [((x + 12.0, 95.0), (x + 8.0, 390.0)) for x in (200.0, 500.0, 800.0)]
target.append(((50.0, 600.0), (60.0, 900.0)))  # an extra unrelated figure

match = greedy_bipartite_match(query, target)
print("matched pairs:", match.pairs)
print("matched distances:", [round(d, 1) for d in match.distances])

r_hr, r_nmd, r_cr = summarize(match, len(query), len(target), beta=150.0)
print(f"hit ratio={r_hr:.3f}  normalized mean distance={r_nmd:.3f}  combined={r_cr:.3f}")

# greedy is an approximation: this 2x2 instance is its classic failure
weights = np.array([[1.0, 2.0], [3.0, 10.0]])
greedy = greedy_match_matrix(weights)
print(f"\ngreedy on [[1,2],[3,10]] picks {sorted(greedy.distances)} (total {sum(greedy.distances):.0f}); "
      f"the optimal matching {{2, 3}} totals 5")
