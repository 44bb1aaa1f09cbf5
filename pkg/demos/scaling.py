"""
How projection time grows with the number of fluents
=====================================================
"""

import time

import matplotlib.pyplot as plt

from hpxf import Theory, project
from hpxf.generators import scaling_domain, scaling_plan

sizes = [4, 8, 16, 32, 64, 128]
times = []
for n in sizes:
    th = Theory(scaling_domain(n))
    plan = scaling_plan(n)
    runs = []
    for _ in range(5):
        start = time.perf_counter()
        project(plan, th)
        runs.append(time.perf_counter() - start)
    times.append(min(runs))
    print(f"{n:4d} fluents  {min(runs) * 1000:8.2f} ms")

plt.loglog(sizes, [t * 1000 for t in times], "o-")
plt.xlabel("fluents")
plt.ylabel("projection time (ms)")
plt.savefig("scaling.png", dpi=120)
