"""Compile-once block encodings for masked similarity-transformed
effective Hamiltonians: nested low-rank factorization, deterministic
ladder synthesis, a dense verification oracle, a frozen circuit IR with
re-dialable parameters, and closed-form resource accounting."""

from . import (
    circuit_ir,
    diagnostics,
    errors,
    factorization,
    integrals,
    jw,
    ladders,
    mask_engine,
    oracle,
    qsp,
    resources,
)
from .circuit_ir import CircuitSkeleton, DialSheet, Mask, compile_skeleton, dial
from .factorization import (
    GeneratorPool,
    HamiltonianPool,
    T2Tensor,
    build_hamiltonian_pool,
    mp2_amplitudes,
    nested_svd_t2,
    pivoted_cholesky,
)
from .integrals import IntegralSet, mean_field_shift, parse_fcidump, synth_instance

__version__ = "0.1.0"
