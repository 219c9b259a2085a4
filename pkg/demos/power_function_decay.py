"""How fast does P-greedy drive the power function down?

We take 400 Fibonacci-spiral frequencies in a disk, let P-greedy rank them,
and watch three quantities as nodes are added:

* the largest power function value over the remaining candidates
  (this is the number P-greedy maximizes at every step),
* the fill distance of the chosen nodes inside the disk,
* the Lebesgue constant estimated on the candidate set.

For comparison the same counts of random nodes are scored too.

    python demos/power_function_decay.py
"""

import numpy as np

from greedy_inverse import (
    GreedyConfig,
    KernelConfig,
    default_shape,
    fibonacci_nodes,
    fill_distance,
    lebesgue_constant,
    power_function,
    select_error_based,
)
from greedy_inverse.kernels import disk_candidates

R_MAX = 0.1
nodes = fibonacci_nodes(400, R_MAX)
kernel = KernelConfig("matern52", default_shape(nodes, R_MAX))
print(f"kernel: {kernel.family}, shape {kernel.shape:.2f}")

sel = select_error_based(nodes.points, kernel, GreedyConfig("error", n=120))
disk = disk_candidates(R_MAX, 61)
rng = np.random.default_rng(1)

print(f"{'n':>4} {'max P':>10} {'h greedy':>10} {'h random':>10} {'Lambda greedy':>14} {'Lambda random':>14}")
for n in (5, 10, 20, 40, 80, 120):
    chosen = nodes.points[sel.order[:n]]
    random = nodes.points[rng.choice(len(nodes.points), n, replace=False)]
    # the trace entry k is the max that picked node k, i.e. the max before it was added
    p_max = sel.indicator_trace[n] if n < len(sel) else power_function(kernel, chosen, nodes.points).max()
    print(f"{n:4d} {p_max:10.3e} {fill_distance(chosen, disk):10.4f} {fill_distance(random, disk):10.4f}"
          f" {lebesgue_constant(kernel, chosen, nodes.points).lambda_max:14.3f}"
          f" {lebesgue_constant(kernel, random, nodes.points).lambda_max:14.3f}")

# Greedy nodes cover the disk evenly, so the fill distance shrinks roughly
# like 1/sqrt(n) and the Lebesgue constant stays modest. Random subsets leave
# holes, which shows up in both columns.
