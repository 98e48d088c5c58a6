"""
Moving the window along the orbit
=================================

Fix delta and slide the window [tau, tau + 1] along one evolution from the
excited state. Below the exceptional point everything repeats with period
pi / sqrt(1 - delta**2); above it the bound fades as the state settles.
"""

import math

import numpy as np

from qsl_lab.sweep import figure_specs, run

for figure in (2, 3):
    for spec in figure_specs(figure, tau_steps=150):
        rows = run(spec)
        tq = np.array([r.tau_qsl for r in rows])
        print(f"delta = {spec.delta}: min tau_qsl {tq.min():.4f}, max {tq.max():.4f}, "
              f"last {tq[-1]:.2e}, final p {rows[-1].population:.4f}")
        if abs(spec.delta) < 1:
            print(f"  period pi/sqrt(1 - delta^2) = {math.pi / math.sqrt(1 - spec.delta**2):.4f}")
