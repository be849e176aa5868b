"""Dense/sparse Jordan-Wigner primitives for the verification oracle.

Mode ``p`` maps to qubit ``p`` with qubit 0 as the most significant bit of
the computational-basis index, so ``a_p^dag = Z^(p) (x) sigma^+ (x) I`` in
kron order.  Basis state ``|0>`` is unoccupied.
"""

from functools import lru_cache

import numpy as np
from scipy import sparse

from .errors import ShapeError

MAX_QUBITS = 12

_SZ = sparse.csr_matrix(np.array([[1.0, 0.0], [0.0, -1.0]]))
_ID2 = sparse.identity(2, format="csr")
# creation operator on one mode: |1><0|
_CR = sparse.csr_matrix(np.array([[0.0, 0.0], [1.0, 0.0]]))


def _check_n(n):
    if not 1 <= n <= MAX_QUBITS:
        raise ShapeError(f"mode count {n} outside supported range 1..{MAX_QUBITS}")


@lru_cache(maxsize=None)
def jw_ladder_ops(n):
    """Creation/annihilation matrices for all ``n`` modes.

    Returns ``(creations, annihilations)``, tuples of sparse CSR matrices of
    dimension ``2**n`` satisfying ``{a_p, a_q^dag} = delta_pq I``.
    """
    _check_n(n)
    creations = []
    for p in range(n):
        op = sparse.identity(1, format="csr")
        for q in range(n):
            if q < p:
                op = sparse.kron(op, _SZ, format="csr")
            elif q == p:
                op = sparse.kron(op, _CR, format="csr")
            else:
                op = sparse.kron(op, _ID2, format="csr")
        op.eliminate_zeros()
        creations.append(op)
    annihilations = tuple(sparse.csr_matrix(c.conj().T) for c in creations)
    return tuple(creations), annihilations


@lru_cache(maxsize=None)
def hamming_weights(n):
    """Occupation count of every computational-basis index."""
    _check_n(n)
    return np.array([bin(i).count("1") for i in range(2**n)], dtype=np.int64)


def number_operator(n):
    """Total number operator as a sparse diagonal matrix."""
    return sparse.diags(hamming_weights(n).astype(float), format="csr")


def sector_indices(n, n_elec):
    """Basis indices of the fixed-particle-number sector."""
    return np.nonzero(hamming_weights(n) == n_elec)[0]


def sector_projector_diagonal(n, n_elec):
    """0/1 diagonal of the particle-number sector projector."""
    return (hamming_weights(n) == n_elec).astype(float)


def mode_bit(n, index, p):
    """Occupation of mode ``p`` in basis state ``index``."""
    return (index >> (n - 1 - p)) & 1


def basis_state(n, occupied):
    """Index of the determinant with the given modes occupied."""
    idx = 0
    for p in occupied:
        idx |= 1 << (n - 1 - p)
    return idx


def pauli_x(total, q):
    """Qubit X on position ``q`` of a ``total``-qubit register (sparse)."""
    dim = 2**total
    src = np.arange(dim)
    dst = src ^ (1 << (total - 1 - q))
    return sparse.csr_matrix((np.ones(dim), (dst, src)), shape=(dim, dim))


def controlled_x(total, control, target):
    """CNOT with the given control/target qubit positions (sparse)."""
    dim = 2**total
    src = np.arange(dim)
    cbit = (src >> (total - 1 - control)) & 1
    dst = src ^ (cbit << (total - 1 - target))
    return sparse.csr_matrix((np.ones(dim), (dst, src)), shape=(dim, dim))


def phase_layer(n, phases):
    """Diagonal ``prod_p exp(i phi_p n_p)`` over the mode register."""
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (n,):
        raise ShapeError("one phase per mode required")
    diag = np.zeros(2**n)
    for p in range(n):
        occ = (np.arange(2**n) >> (n - 1 - p)) & 1
        diag = diag + phases[p] * occ
    return np.exp(1j * diag)


def pair_phase_diagonal(n, p, q, phi):
    """Diagonal ``exp(i phi n_p n_q)`` over the mode register."""
    idx = np.arange(2**n)
    both = ((idx >> (n - 1 - p)) & 1) * ((idx >> (n - 1 - q)) & 1)
    return np.exp(1j * phi * both)
