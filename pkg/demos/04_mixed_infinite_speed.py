"""
A mixed start and a vanishing bound
===================================

With the mixed initial state diag(0.7, 0.3) the relative-purity bound can drop
to zero even though the state visibly moves during the window. Rows with a
tiny tau_qsl and a sizeable trace distance show that directly.
"""

from qsl_lab.sweep import figure_specs, run

for figure in (4, 5):
    for spec in figure_specs(figure):
        rows = run(spec)
        hits = [r for r in rows if r.tau_qsl < 0.01 and r.trace_distance > 0.1]
        print(f"delta = {spec.delta:+.1f} ({rows[0].regime.value}): {len(hits)} such rows")
        for r in hits[:3]:
            print(f"  tau = {r.tau:6.3f}  tau_qsl = {r.tau_qsl:.2e}  D = {r.trace_distance:.3f}"
                  f"  f = {r.relative_purity:.6f}")
