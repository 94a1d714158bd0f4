"""Smoke test for the nsac extension module.

Build and install first:  pip install maturin && maturin develop -m crates/py/Cargo.toml
"""
import math
import os
import tempfile

import nsac

a1, a2 = nsac.bracket_roots(0.0)
assert (a1, a2) == (1.0, 1.0)
_, a2 = nsac.bracket_roots(math.e - 2)
assert abs(a2 - math.e) < 1e-10

grid = nsac.Grid(16.0, 256)
params = nsac.Params(beta=2.0, epsilon=0.5)
state = nsac.State.interface(grid)
e0 = nsac.lyapunov_energy(state, params)
m0 = nsac.mass_excess(state)
dt, limit = nsac.stable_dt(state, params)
print(f"E0 = {e0:.6f}, dt = {dt:.3e} ({limit})")

final, records = nsac.run(state, params, t_final=0.25, record_every=20)
assert final.t == 0.25
assert abs(nsac.mass_excess(final) - m0) <= 1e-12 * max(abs(m0), 1.0)
for r in records:
    assert r["e_lyap"] + r["cumulative_diss"] <= e0 * (1 + 1e-3)
    assert -1 - 1e-8 <= r["phi_min"] and r["phi_max"] <= 1 + 1e-8
    assert r["bracket_violations"] == 0
print(f"{len(records)} records, e_lyap {records[0]['e_lyap']:.6f} -> {records[-1]['e_lyap']:.6f}")

eq = nsac.State.equilibrium(grid)
after, _ = nsac.step(eq, params)
assert after.v == eq.v and after.phi == eq.phi
assert nsac.lemma24_residual(after, eq, params) == 0.0

try:
    nsac.step(nsac.State.interface(nsac.Grid(16.0, 16), phi_left=1.0, u_bump=(-40.0, 0.0, 2.5),
                                   v_bump=(0.0, 0.0, 1.0), theta_bump=(0.0, 0.0, 1.0)),
              params, dt=0.5)
except nsac.SimulationError as e:
    print("guard:", e)

rows = nsac.mms_convergence(nsac.Params(), resolutions=[64, 128, 256], t_final=0.1)
print("mms orders:", [round(o, 3) for o in rows[-1][2]])

with tempfile.TemporaryDirectory() as tmp:
    cfg = os.path.join(tmp, "run.txt")
    with open(cfg, "w") as fh:
        fh.write(f"n_cells = 128\nt_final = 0.1\noutput_dir = {os.path.join(tmp, 'out')}\n")
    t, steps, out = nsac.run_config(cfg)
    ok, checks = nsac.audit(os.path.join(out, "diagnostics.csv"))
    print(f"run_config: t = {t} after {steps} steps, audit passed = {ok}")
    assert ok, checks

print("smoke test passed")
