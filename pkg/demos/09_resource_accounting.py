"""Closed-form resource accounting across connectivity models.

The estimator prices the compiled fabric with exact integer conventions;
the connectivity table sets the per-block cost of the four-mode pair
rotations.
"""

from composer import circuit_ir as cir
from composer.factorization import (
    build_hamiltonian_pool,
    mp2_amplitudes,
    nested_svd_t2,
)
from composer.integrals import synth_instance
from composer.resources import block_cost, estimate

for conn in ("full", "linear:1", "linear:3", "grid:2", "grid:4"):
    fswaps, cz = block_cost(conn)
    print(f"{conn:>10}: {fswaps:>2} routing swaps, {cz:>3} CZ per pair block")
print()

ints = synth_instance(7, 3, 2)
ham = build_hamiltonian_pool(ints, 1e-8, 0.0)
gen = nested_svd_t2(mp2_amplitudes(ints), 0.0, 0.0)
plan = cir.pivots_from_pools(ham, gen)
skel = cir.compile_skeleton(ham.ell, gen.ell, ints.n_so, plan, "full",
                            qsp_degree=10)

for conn in ("full", "linear:2"):
    est = estimate(skel, connectivity=conn, n_occ=2, n_virt=4)
    print(f"connectivity {conn}:")
    print(est.format_table())
    print(f"single-qubit rotations tallied separately: "
          f"{est.single_qubit_rotations}")
    print()
