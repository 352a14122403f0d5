"""
The benchmark harness
=====================

``bench`` fans one seed list across a task list and emits one record per
(task, seed) pair.  Randomness comes from named streams expanded from each
seed, so records are reproducible; wall time is the only nondeterministic
field and can be dropped.
"""

import json

from minmaxpart import Graph, bench
from minmaxpart.instances import gen_random, star_with_terminals

tasks = [
    {"id": "cycle8-k2", "kind": "kpart", "k": 2, "backend": "exact",
     "graph": Graph(8, [(i, (i + 1) % 8, 1.0) for i in range(8)])},
    {"id": "gnp10-k2", "kind": "kpart", "k": 2, "backend": "exact",
     "graph": gen_random("gnp", {"n": 10, "p": 0.5}, seed=11)},
    {"id": "star4-multiway", "kind": "multiway", "terminals": [0, 1, 2, 3],
     "backend": "exact", "graph": star_with_terminals(4)[0]},
    {"id": "gnp8-k2-sdp", "kind": "kpart", "k": 2, "backend": "sdp",
     "graph": gen_random("gnp", {"n": 8, "p": 0.5}, seed=7)},
]

records = bench(tasks, seeds=[0, 1], timings=True)
for rec in records:
    print(json.dumps(rec, sort_keys=True))

# dropping timings makes reruns byte-identical
again = bench(tasks, seeds=[0, 1], timings=False)
twice = bench(tasks, seeds=[0, 1], timings=False)
print("\nbyte-deterministic without timings:", again == twice)
