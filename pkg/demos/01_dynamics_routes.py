"""
Three ways to evolve the driven qubit
=====================================

The closed form, the normalized propagator and a fourth-order Runge-Kutta
integration of the nonlinear master equation should all land on the same
state. We check that in each regime of the detuning ratio delta = gamma/omega.
"""

import numpy as np

from qsl_lab import dynamics as dyn
from qsl_lab import matrix2 as m2

# one delta from each regime plus the exceptional point itself
for delta in (0.4, 1.0, 2.5):
    params = dyn.ModelParams.from_delta(delta)
    print(f"delta = {delta}: {params.regime.value}, energies {dyn.energy_eigenvalues(params)}")
    for t in (0.5, 5.0):
        closed = dyn.evolve_closed_form(dyn.excited(), params, t)
        prop = dyn.evolve_propagator(dyn.excited(), params, t)
        ode = dyn.integrate_ode(dyn.excited(), params, t, 20_000).states[-1]
        print(
            f"  t = {t:3}: p = {closed[0, 0].real:.6f}"
            f"  |closed - prop| = {m2.max_entry(closed - prop):.1e}"
            f"  |closed - rk4| = {m2.max_entry(closed - ode):.1e}"
        )

# in the broken phase the state settles and the generator dies out
params = dyn.ModelParams.from_delta(2.5)
for t in (1.0, 10.0, 50.0):
    rho = dyn.evolve_closed_form(dyn.excited(), params, t)
    print(f"delta 2.5, t = {t:4}: ||L rho||_inf = {m2.schatten_norm(dyn.generator(rho, params), np.inf):.2e}")
