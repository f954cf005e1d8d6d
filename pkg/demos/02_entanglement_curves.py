"""Pre-pulse vs echoed entanglement for the periodic two-level model.

The environment starts in a pure state, so the joint state stays pure and
entanglement is the normalized von Neumann entropy of the reduced qubit
state.  Scanning the pulse time over one full period shows that echoed
entanglement (at 2 tau) is often larger than pre-pulse entanglement (at
tau): whenever the curves cross that way, the pulse damaged the coherence
instead of recovering it.  At exactly tau0 the pre-pulse state is a
product while the echoed state is maximally entangled; grid refinement
confirms this happens at an isolated point, not over an interval.

Writes entanglement_curves.csv (columns: tau, E_pre, E_echo).
"""
import numpy as np

from echoent import classify_scan, fig1_model, isolation_refinement

scn = fig1_model(1.0)
records, summary = classify_scan(scn.pair, scn.a, scn.b, scn.R0, scn.tau_grid)

with open("entanglement_curves.csv", "w", newline="") as fh:
    fh.write("tau,E_pre,E_echo\n")
    for r in records:
        fh.write(f"{r.tau:.16e},{r.entropy_pre:.16e},{r.entropy_echo:.16e}\n")
print(f"wrote entanglement_curves.csv ({summary['points']} rows)")

e_pre = np.array([r.entropy_pre for r in records])
e_echo = np.array([r.entropy_echo for r in records])
enhanced = np.mean(e_echo > e_pre + 1e-12)
print(f"echo *increases* entanglement at {100 * enhanced:.0f}% of grid points")

print("\necho-induced points (separable at tau, entangled at 2 tau):")
for entry in summary["echo_induced"]:
    r = records[entry["index"]]
    print(f"  tau = {entry['tau']:.4f}:  E_pre = {r.entropy_pre:.2e},  "
          f"E_echo = {r.entropy_echo:.6f}")

print("\ngrid refinement (flagged fraction must decay for isolated points):")
for lev in isolation_refinement(scn.pair, scn.a, scn.b, scn.R0,
                                (0.0, 4.0), levels=4, base_points=201):
    print(f"  spacing {lev['spacing']:.5f}: flagged {lev['flagged']:3d} of "
          f"{lev['points']:5d} points (fraction {lev['fraction']:.2e}, "
          f"longest run {lev['max_run']})")
