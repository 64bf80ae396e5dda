"""
Link budget and onboard compute
===============================

A satellite must download the model, train, and upload before it leaves the
gateway's disk, all on one energy budget.  This walks through the numbers.
"""

from leohfl.linkmodel import achievable_rate, channel_gain, propagation_delay, transfer_time
from leohfl.resource import epoch_count, epoch_energy, epoch_time, optimal_frequency, plan_compute

# Channel gain from antenna gains and path loss (all in dB).
g = channel_gain(sat_gain_dbi=25, gw_gain_dbi=45, pathloss_db=1.5)
print(f"channel gain {g:.2f}")

# Shannon rate on a 1 GHz subcarrier at SINR 5 (linear), and transfer time of a
# 1 Gbit payload over 500 km.
rate = achievable_rate(True, 1e9, 5.0)
print(f"rate {rate / 1e9:.3f} Gbps, propagation {propagation_delay(500) * 1e3:.4f} ms, "
      f"transfer {transfer_time(1e9, rate, 500):.4f} s")

# Compute: one epoch over D samples at frequency C costs D*Cd/C seconds and
# eps*C^2*Cd*D joules.  Faster is shorter but quadratically more expensive.
E, eps, Cd = 1e5, 5e-24, 1e8
for C in (0.2e9, 0.36e9, 0.6e9):
    print(f"C={C / 1e9:.2f} GHz: epoch {epoch_time(93, Cd, C):6.2f} s, "
          f"{epoch_energy(eps, C, Cd, 93):7.0f} J")

# The balancing frequency makes the time and energy limits meet.
for window in (300.0, 438.0, 600.0):
    C = optimal_frequency(E, eps, window, 0.0, 0.0, 1e9)
    print(f"window {window:.0f} s -> C = {C / 1e9:.3f} GHz, "
          f"K(D=93) = {epoch_count(E, eps, C, Cd, 93, window)}, "
          f"K(D=18) = {epoch_count(E, eps, C, Cd, 18, window)}")

# plan_compute wraps it all, including the link overheads.
print(plan_compute(E, eps, 1e9, 93, 438.0, uplink_s=0.2, downlink_s=0.2))
