"""Deterministic Givens ladders: prepare arbitrary one- and two-electron states.

The angles come from the tail-norm recursion; the fixed pivot and ordering
freeze the topology, so only the angle values change with the data vector.
"""

import numpy as np

from composer import jw, ladders

rng = np.random.default_rng(5)
n = 6

u = rng.normal(size=n) + 1j * rng.normal(size=n)
u /= np.linalg.norm(u)
sched = ladders.one_electron_angles(u)
print(f"one-electron ladder: pivot {sched.pivot[0]}, "
      f"{len(sched.thetas)} rotations, angles in "
      f"[{sched.thetas.min():.3f}, {sched.thetas.max():.3f}]")

psi = ladders.prepare_one_electron(u)
target = np.zeros(2**n, dtype=complex)
for p in range(n):
    target[jw.basis_state(n, [p])] = u[p]
print(f"  prepared-amplitude error: {np.abs(psi - target).max():.2e}")

pairs = ladders.pair_indices(n)
up = rng.normal(size=len(pairs)) + 1j * rng.normal(size=len(pairs))
up /= np.linalg.norm(up)
sched2 = ladders.two_electron_angles(up)
vac = np.zeros(2**n, dtype=complex)
vac[0] = 1.0
psi2 = ladders.apply_ladder_dense(sched2, vac)
target2 = np.zeros(2**n, dtype=complex)
for k, (p, q) in enumerate(pairs):
    target2[jw.basis_state(n, [p, q])] = up[k]
print(f"two-electron ladder: pivot pair {sched2.pivot}, "
      f"{len(sched2.thetas)} pair rotations")
print(f"  prepared-amplitude error: {np.abs(psi2 - target2).max():.2e}")

# the number-conserving form is the one reused inside adaptors: it leaves
# particle number invariant on any state and inverts by negated angles
state = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
state /= np.linalg.norm(state)
nop = jw.number_operator(n)
nc = sched2.as_number_conserving()
moved = ladders.apply_ladder_dense(nc, state)
print(f"number conservation: <N> drift "
      f"{abs(np.vdot(moved, nop @ moved) - np.vdot(state, nop @ state)):.2e}")
back = ladders.apply_ladder_dense(nc, moved, inverse=True)
print(f"inverse property: round-trip error {np.abs(back - state).max():.2e}")
