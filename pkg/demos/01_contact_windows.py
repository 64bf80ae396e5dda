"""
Contact windows and gateway association
=======================================

Ten satellites fly three concentric circular tracks over three ground
gateways.  We look at how long each one stays in coverage and where the two
association rules send it.
"""

import numpy as np
from leohfl.association import associate, nearest_associate
from leohfl.harness import default_scenario
from leohfl.orbital import covering_gateways, position_at, window_time

sc = default_scenario()
sats = sc.satellites()
gws = sc.gateways

# Where is everyone at t = 0, and which disks contain them?
for s in sats:
    p = position_at(s)
    seen = [g.id for g in covering_gateways(s, gws)]
    print(f"sat {s.id}: ({p.x:7.1f}, {p.y:7.1f}) km  covered by {seen}")

# Remaining time inside each covering disk.  Overlap satellites have a choice.
for s in sats:
    windows = {g.id: round(window_time(s, g)) for g in covering_gateways(s, gws)}
    print(f"sat {s.id}: windows {windows}")

# The longest-window rule versus the nearest-gateway rule.
a = associate(sats, gws)
n = nearest_associate(sats, gws)
for s in sats:
    print(f"sat {s.id}: proposed -> {a.assignments[s.id]}, nearest -> {n.assignments[s.id]}")

# Summed usable window over the constellation (the proposed rule never loses).
total = lambda plan: sum(p.window_s for p in plan.plans.values())
print(f"total window: proposed {total(a):.0f} s, nearest {total(n):.0f} s")

# A quick look at the motion: one full lap of the inner track.
t = np.linspace(0, sats[0].track.period, 9)
print(np.round([[position_at(sats[0], ti).x, position_at(sats[0], ti).y] for ti in t], 1))
