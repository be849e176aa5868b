import numpy as np
import pytest

from composer.factorization import (
    BilinearLadder,
    GeneratorPool,
    build_hamiltonian_pool,
    mp2_amplitudes,
    nested_svd_t2,
)
from composer.integrals import synth_instance

H2_LIKE_FCIDUMP = """\
&FCI NORB=1,NELEC=2,MS2=0,
&END
0.7137 1 1 1 1
-1.2528 1 1 0 0
0.7137 0 0 0 0
"""


@pytest.fixture(scope="session")
def small_instance():
    """n_so = 4, two electrons; canonical by construction."""
    return synth_instance(7, 2, 2)


@pytest.fixture(scope="session")
def medium_instance():
    """n_so = 6, two electrons."""
    return synth_instance(3, 3, 2)


@pytest.fixture(scope="session")
def small_pools(small_instance):
    ham = build_hamiltonian_pool(small_instance, 1e-10, 0.0)
    gen = nested_svd_t2(mp2_amplitudes(small_instance), 0.0, 0.0)
    return ham, gen


def mixed_generator_pool(base_gen, n_so=4, seed=11, extra=2):
    """Pair ladders from a pool plus deterministic bilinear singles."""
    rng = np.random.default_rng(seed)
    ladders = list(base_gen.ladders)
    occ = base_gen.n_occ
    for k in range(extra):
        u = np.zeros(n_so, dtype=complex)
        v = np.zeros(n_so, dtype=complex)
        u[occ + (k % (n_so - occ))] = 1.0
        v[k % occ] = 1.0
        ladders.append(
            BilinearLadder(
                u=u,
                v=v,
                coefficient=float(0.05 + 0.04 * k + 0.01 * rng.uniform()),
                address=len(ladders) + 1,
            )
        )
    return GeneratorPool(
        ladders=tuple(ladders),
        n_occ=base_gen.n_occ,
        n_virt=base_gen.n_virt,
        n_elec=base_gen.n_elec,
    )


@pytest.fixture(scope="session")
def mixed_gen_pool(small_pools):
    _, gen = small_pools
    return mixed_generator_pool(gen)
