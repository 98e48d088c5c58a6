"""
Speed limit versus detuning
===========================

Scan delta at a fixed driving time tau_d = 1 starting from the excited state.
The population left in the excited level drops as delta grows, while the
speed-limit time rises, peaks and then levels off.
"""

import numpy as np

from qsl_lab.sweep import SweepSpec, run_fig1

rows = run_fig1(SweepSpec(delta_min=-15, delta_max=15, delta_steps=121))

print(f"{'delta':>7} {'tau_qsl':>9} {'p(tau_d)':>9}  regime")
for r in rows[::6]:
    print(f"{r.delta:7.2f} {r.tau_qsl:9.4f} {r.population:9.4f}  {r.regime.value}")

tq = np.array([r.tau_qsl for r in rows])
best = rows[int(np.argmax(tq))]
print(f"\nlargest tau_qsl {best.tau_qsl:.4f} at delta = {best.delta:.2f}")
print(f"tau_qsl at the edges: {rows[0].tau_qsl:.4f} (delta -15), {rows[-1].tau_qsl:.4f} (delta 15)")
