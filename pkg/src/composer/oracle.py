"""Dense Jordan-Wigner oracle for block-encoding verification.

Every block encoding is assembled as an explicit dense unitary straight
from its defining construction (vacuum-reflection dyad gadgets, flagged
occupation gadgets, PREP-SELECT-PREP multiplexing) and then checked
against the dense operator it is supposed to encode, restricted to the
working particle-number sector.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from . import jw, ladders
from .errors import (
    CapacityError,
    MaskError,
    ShapeError,
    ValidationError,
)
from .factorization import bilinear_asym_spectrum, generator_branch_alpha
from .jw import jw_ladder_ops, sector_indices  # re-exported oracle surface

REPORT_FORMAT = "composer-report-v1"

_H2 = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Dense operator on the full 2**n Jordan-Wigner space."""

    matrix: np.ndarray
    n: int
    tag: str = ""

    def __post_init__(self):
        if self.n > jw.MAX_QUBITS:
            raise ShapeError(f"{self.n} qubits exceeds the dense oracle limit")
        if self.matrix.shape != (2**self.n, 2**self.n):
            raise ShapeError("matrix dimension inconsistent with qubit count")


@dataclass(frozen=True)
class BlockEncodingReport:
    """Normalization, ancilla count, and measured restricted-block error."""

    alpha: float
    ancillas: int
    measured_error: float
    sector: str
    flags: tuple = ()
    budget: dict | None = None

    def to_json(self):
        doc = {
            "format": REPORT_FORMAT,
            "alpha": self.alpha,
            "ancillas": self.ancillas,
            "measured_error": self.measured_error,
            "sector": self.sector,
            "flags": list(self.flags),
            "budget": self.budget,
        }
        return json.dumps(doc, sort_keys=True)


# ---------------------------------------------------------------------------
# dense reference operators
# ---------------------------------------------------------------------------


def dense_hamiltonian(ints, include_e_nn=True):
    """Second-quantized Hamiltonian built directly from the integrals."""
    n = ints.n_so
    cr, an = jw.jw_ladder_ops(n)
    dim = 2**n
    out = sparse.csr_matrix((dim, dim), dtype=complex)
    for p in range(n):
        for q in range(n):
            if ints.h[p, q] != 0.0:
                out = out + ints.h[p, q] * (cr[p] @ an[q])
    pair_cr = {}
    pair_an = {}
    for p in range(n):
        for q in range(n):
            if p != q:
                pair_cr[(p, q)] = (cr[p] @ cr[q]).tocsr()
                pair_an[(q, p)] = (an[q] @ an[p]).tocsr()
    for p in range(n):
        for q in range(n):
            if p == q:
                continue
            left = pair_cr[(p, q)]
            for r in range(n):
                for s in range(n):
                    if r == s:
                        continue
                    val = ints.eri[p, q, r, s]
                    if val != 0.0:
                        out = out + (0.5 * val) * (left @ pair_an[(s, r)])
    mat = out.toarray()
    if include_e_nn:
        mat = mat + ints.e_nn * np.eye(dim)
    return FockOperator(mat, n, tag="hamiltonian(integrals)")


def hamiltonian_from_pool(pool):
    """Dense rebuild of ``sum_s Omega_s L_s`` from the rank-one pool.

    Excludes the constant shift; compare against
    ``dense_hamiltonian(..., include_e_nn=False)``.
    """
    n = pool.n_so
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    for lad in pool.one_body:
        for j in range(lad.multiplicity):
            w = lad.vectors[:, j]
            out += lad.coefficient * dense_bilinear(w, w, n)
    for lad in pool.channels:
        o_mu = channel_operator(lad.channel, n)
        out += lad.coefficient * (o_mu @ o_mu)
    return FockOperator(out, n, tag="hamiltonian(pool)")


def dense_bilinear(u, v, n):
    """Dense ``a^dag(u) a(v)``."""
    cr, an = jw.jw_ladder_ops(n)
    au = sum(u[p] * cr[p] for p in range(n))
    av = sum(np.conj(v[q]) * an[q] for q in range(n))
    return (au @ av).toarray()


def dense_pair_ladder(lad, n_occ, n):
    """Dense pair-excitation ladder ``B^dag[U] B[V]`` on the full register.

    Virtual wedge indices offset by the occupied count; the occupied wedge
    sits on the lowest modes.
    """
    cr, _ = jw.jw_ladder_ops(n)
    uv = lad.virtual_pair_vector()
    vo = lad.occupied_pair_vector()
    bu = sparse.csr_matrix((2**n, 2**n), dtype=complex)
    for k, (a, b) in enumerate(ladders.pair_indices(len(lad.x))):
        if uv[k] != 0.0:
            bu = bu + uv[k] * (cr[n_occ + a] @ cr[n_occ + b])
    bv = sparse.csr_matrix((2**n, 2**n), dtype=complex)
    for k, (i, j) in enumerate(ladders.pair_indices(len(lad.r))):
        if vo[k] != 0.0:
            bv = bv + vo[k] * (cr[i] @ cr[j])
    return (bu @ bv.conj().T).toarray()


def dense_generator_ladder(lad, n_occ, n):
    """Dense ``L_s`` for any generator ladder kind."""
    if lad.kind == "pair":
        return dense_pair_ladder(lad, n_occ, n)
    if lad.kind == "bilinear":
        return dense_bilinear(lad.u, lad.v, n)
    raise ValidationError(f"unsupported generator ladder kind {lad.kind!r}")


def generator_dense(pool, mask_indices=None):
    """Dense Hermitian masked generator ``sum_s omega_s i(L_s - L_s^dag)``.

    The anti-Hermitian generator itself is ``-i`` times the returned
    matrix.
    """
    n = pool.n_so
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    selected = (
        pool.ladders
        if mask_indices is None
        else [lad for lad in pool.ladders if lad.address in set(mask_indices)]
    )
    for lad in selected:
        lmat = dense_generator_ladder(lad, pool.n_occ, n)
        out += lad.coefficient * 1j * (lmat - lmat.conj().T)
    return FockOperator(out, n, tag="generator(hermitian)")


# ---------------------------------------------------------------------------
# block extraction and error measurement
# ---------------------------------------------------------------------------


def extract_block(w, n):
    """Top-left ``<0_anc| W |0_anc>`` block of a unitary with leading ancillas."""
    dim = 2**n
    if w.shape[0] % dim != 0:
        raise ShapeError("unitary dimension is not a multiple of the system size")
    return np.asarray(w)[:dim, :dim]


def restricted_block_error(w, target, ancilla_count, sector=None, projector=None):
    """Spectral norm of the encoded-block deviation on the working subspace.

    Extracts the all-ancilla-zero block, subtracts the (already scaled)
    target, sandwiches with the particle-number-sector projector and the
    optional model-space projector, and returns the 2-norm.
    """
    n = target.n
    if w.shape[0] != 2 ** (ancilla_count + n):
        raise ShapeError(
            f"unitary dimension {w.shape[0]} != 2**(t + n) with t={ancilla_count}"
        )
    delta = extract_block(w, n) - target.matrix
    if sector is not None:
        diag = jw.sector_projector_diagonal(n, sector)
        delta = delta * diag[:, None] * diag[None, :]
    if projector is not None:
        delta = projector @ delta @ projector
    return float(np.linalg.norm(delta, 2))


def assert_sector_preserving(block, n, tol=1e-11):
    """Check the block is block-diagonal over Hamming-weight sectors."""
    weights = jw.hamming_weights(n)
    off = block[weights[:, None] != weights[None, :]]
    return float(np.abs(off).max(initial=0.0)) <= tol


# ---------------------------------------------------------------------------
# gadget constructions
# ---------------------------------------------------------------------------


def vacuum_reflection_gadget(n):
    """Single-ancilla deterministic encoding of the vacuum projector.

    ``(H (x) I) (|0><0| (x) I + |1><1| (x) (-R0)) (H (x) I)`` with
    ``R0 = I - 2|0^n><0^n|``; the ancilla-zero block is exactly
    ``|0^n><0^n|``.
    """
    dim = 2**n
    r0 = np.ones(dim)
    r0[0] = -1.0
    mid = np.concatenate([np.ones(dim), -r0])
    had = np.kron(_H2, np.eye(dim))
    return had @ (mid[:, None] * had)


def _lift(op, extra):
    """Pad ``extra`` trivially-acting ancillas as most-significant qubits."""
    if extra == 0:
        return np.asarray(op)
    return np.kron(np.eye(2**extra), op)


def _householder_prep(amplitudes):
    """Real orthogonal involution with the amplitude vector as first column."""
    amp = np.asarray(amplitudes, dtype=float)
    if np.any(amp < -1e-14):
        raise ValidationError("prep amplitudes must be nonnegative")
    norm = np.linalg.norm(amp)
    if abs(norm - 1.0) > 1e-10:
        raise ValidationError(f"prep amplitude norm {norm!r} != 1")
    e0 = np.zeros_like(amp)
    e0[0] = 1.0
    v = amp - e0
    vn = np.linalg.norm(v)
    if vn < 1e-14:
        return np.eye(len(amp))
    return np.eye(len(amp)) - 2.0 * np.outer(v, v) / (vn * vn)


def _prep_select_prep(amplitudes, branch_ops, branch_phases, n, workspace=None):
    """Assemble ``(PREP^dag (x) I) W_sel (PREP (x) I)`` as a dense unitary.

    ``branch_ops[s]`` is the unitary of selector value ``s`` on its own
    workspace + system register (``None`` means identity); workspace widths
    are equalized by padding most-significant identity ancillas.
    """
    n_states = len(amplitudes)
    if n_states & (n_states - 1):
        raise ShapeError("amplitude vector length must be a power of two")
    if len(branch_ops) > n_states:
        raise CapacityError(
            f"{len(branch_ops)} branches exceed selector capacity {n_states}"
        )
    dim_sys = 2**n
    widths = [
        0 if op is None else int(np.log2(op.shape[0] // dim_sys))
        for op in branch_ops
    ]
    t = workspace if workspace is not None else max(widths, default=0)
    total_qubits = int(np.log2(n_states)) + t + n
    if total_qubits > 13:
        raise ShapeError(
            f"dense assembly needs {total_qubits} qubits; the oracle caps at 13"
        )
    if any(wd > t for wd in widths):
        raise ShapeError("branch workspace exceeds the shared width")
    dim_ws = 2**t
    blocks = np.zeros((n_states, dim_ws * dim_sys, dim_ws * dim_sys), dtype=complex)
    for s in range(n_states):
        if s < len(branch_ops) and branch_ops[s] is not None:
            op = _lift(branch_ops[s], t - widths[s])
            phase = branch_phases[s] if s < len(branch_phases) else 1.0
            blocks[s] = phase * op
        else:
            blocks[s] = np.eye(dim_ws * dim_sys)
    prep = _householder_prep(amplitudes)
    w = np.einsum("mt,mab,ms->tasb", prep.conj(), blocks, prep, optimize=True)
    dim = n_states * dim_ws * dim_sys
    return w.reshape(dim, dim)


def dyad_block_encoding(u, v, lam, n, pivot_u=None, pivot_v=None):
    """Single-ancilla block encoding of the one-electron dyad ``|u><v|``.

    The vacuum-reflection gadget conjugated by the two prep-form ladders;
    the encoded block equals the dyad exactly on the one-excitation
    sector.  ``lam`` only sets the reported normalization (``alpha = lam``);
    a zero coefficient falls back to ``alpha = 1`` and is flagged.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if lam < 0:
        raise ValidationError("lam must be nonnegative")
    su = ladders.one_electron_angles(u, pivot=pivot_u, n=n)
    sv = ladders.one_electron_angles(v, pivot=pivot_v, n=n)
    prep_u = ladders.schedule_unitary(su)
    prep_v = ladders.schedule_unitary(sv)
    w = (
        _lift(prep_u, 1)
        @ vacuum_reflection_gadget(n)
        @ _lift(prep_v.conj().T, 1)
    )
    flags = ()
    alpha = lam
    if lam == 0.0:
        alpha = 1.0
        flags = ("DegenerateCoefficient",)
        target = FockOperator(np.zeros((2**n, 2**n), dtype=complex), n)
    else:
        target = FockOperator(dyad_matrix(u, v, n), n, tag="dyad")
    err = restricted_block_error(w, target, 1, sector=1)
    return w, BlockEncodingReport(
        alpha=alpha, ancillas=1, measured_error=err, sector="N=1", flags=flags
    )


def dyad_matrix(u, v, n):
    """Dense ``|u><v|`` over one-electron basis states."""
    dim = 2**n
    pu = np.zeros(dim, dtype=complex)
    pv = np.zeros(dim, dtype=complex)
    for p in range(n):
        pu[jw.basis_state(n, [p])] = u[p]
        pv[jw.basis_state(n, [p])] = v[p]
    return np.outer(pu, pv.conj())


def pair_dyad_block_encoding(u_pairs, v_pairs, lam, n, pivot_u=None, pivot_v=None):
    """Single-ancilla block encoding of the two-electron dyad ``|U><V|``."""
    su = ladders.two_electron_angles(u_pairs, pivot_pair=pivot_u, n=n)
    sv = ladders.two_electron_angles(v_pairs, pivot_pair=pivot_v, n=n)
    prep_u = ladders.schedule_unitary(su)
    prep_v = ladders.schedule_unitary(sv)
    w = (
        _lift(prep_u, 1)
        @ vacuum_reflection_gadget(n)
        @ _lift(prep_v.conj().T, 1)
    )
    target = FockOperator(pair_dyad_matrix(u_pairs, v_pairs, n), n, tag="pair dyad")
    err = restricted_block_error(w, target, 1, sector=2)
    return w, BlockEncodingReport(
        alpha=lam, ancillas=1, measured_error=err, sector="N=2"
    )


def pair_dyad_matrix(u_pairs, v_pairs, n):
    """Dense ``|U><V|`` over two-electron basis states."""
    dim = 2**n
    pu = np.zeros(dim, dtype=complex)
    pv = np.zeros(dim, dtype=complex)
    for k, (p, q) in enumerate(ladders.pair_indices(n)):
        pu[jw.basis_state(n, [p, q])] = u_pairs[k]
        pv[jw.basis_state(n, [p, q])] = v_pairs[k]
    return np.outer(pu, pv.conj())


def occupation_gadget(w_vec, n, pivot=None):
    """Flagged encoding of the rotated occupation ``n_w`` (one ancilla).

    The number-conserving ladder for ``w`` conjugates a flag-copy gadget
    ``X_f CNOT_{pivot->f}``; the flag-zero block is ``n_w`` exactly on
    every particle sector.
    """
    sched = ladders.one_electron_angles(w_vec, pivot=pivot, n=n).as_number_conserving()
    pivot = sched.pivot[0]
    u_lad = ladders.schedule_unitary(sched)
    total = 1 + n
    core = (jw.pauli_x(total, 0) @ jw.controlled_x(total, 1 + pivot, 0)).toarray()
    lifted = _lift(u_lad, 1)
    return lifted @ core @ lifted.conj().T


def diagonal_one_body_encoding(eigvals, rotation_full, n):
    """PREP-SELECT-PREP encoding of ``sum_xi lambda_xi n_(xi)`` rotated.

    Index register of width ``ceil(log2 R)`` loads ``sqrt(|lambda|/Gamma)``
    amplitudes; each branch is a flag-copy gadget on the corresponding
    mode with the eigenvalue sign as a branch phase; the shared basis
    rotation conjugates the whole gadget.  The encoded block equals the
    operator divided by ``Gamma = sum |lambda|`` exactly.
    """
    eigvals = np.asarray(eigvals, dtype=float)
    r = len(eigvals)
    if r == 0:
        raise ValidationError("empty eigenvalue list")
    gamma = np.abs(eigvals).sum()
    a_i = max(int(np.ceil(np.log2(r))), 0) if r > 1 else 0
    amps = np.zeros(2**a_i)
    amps[:r] = np.sqrt(np.abs(eigvals) / gamma)
    total = 1 + n
    branch_ops = []
    branch_phases = []
    for xi in range(r):
        branch_ops.append(
            (jw.pauli_x(total, 0) @ jw.controlled_x(total, 1 + xi, 0)).toarray()
        )
        branch_phases.append(1.0 if eigvals[xi] >= 0 else -1.0)
    gadget = _prep_select_prep(amps, branch_ops, branch_phases, n, workspace=1)
    net = ladders.rotation_network_from_matrix(rotation_full)
    u_rot = ladders.network_unitary(net)
    lifted = _lift(u_rot, a_i + 1)
    return lifted @ gadget @ lifted.conj().T, gamma, a_i + 1


def reflect_about_ancilla_vacuum(t, n):
    """Diagonal ``2 |0^t><0^t| (x) I - I`` on a (t + n)-qubit register."""
    dim = 2 ** (t + n)
    diag = -np.ones(dim)
    diag[: 2**n] = 1.0
    return diag


def squared_block_gadget(w, t, n):
    """Signal-qubit gadget whose block is the square of ``<0_t|W|0_t>``.

    Averages ``W R0 W`` (one reflection-conjugated double application)
    with the identity on a Hadamard-conjugated signal qubit; for an
    involution ``W`` with Hermitian block ``A`` the result encodes ``A^2``
    exactly.
    """
    refl = reflect_about_ancilla_vacuum(t, n)
    double = w @ (refl[:, None] * w)
    dim = double.shape[0]
    had = np.kron(_H2, np.eye(dim))
    mid = np.zeros((2 * dim, 2 * dim), dtype=complex)
    mid[:dim, :dim] = double
    mid[dim:, dim:] = np.eye(dim)
    return had @ mid @ had


def channel_block_encoding(ch, n, squared=True):
    """Deterministic block encoding of a diagonalized Cholesky channel.

    Unsquared form encodes ``O_mu / Gamma_mu`` with ``a_I + 1`` ancillas;
    the squared form adds one signal qubit and encodes
    ``O_mu^2 / Gamma_mu^2``.
    """
    if ch.eigvals is None:
        raise ValidationError("channel must be eigendecomposed first")
    if ch.rank == 0:
        raise ValidationError("channel has no retained eigenmodes")
    w, gamma, t = diagonal_one_body_encoding(ch.eigvals, ch.rotation_full, n)
    o_mu = channel_operator(ch, n)
    if not squared:
        target = FockOperator(o_mu / gamma, n, tag="channel")
        err = restricted_block_error(w, target, t)
        return w, BlockEncodingReport(
            alpha=gamma, ancillas=t, measured_error=err, sector="all"
        )
    w2 = squared_block_gadget(w, t, n)
    target = FockOperator(o_mu @ o_mu / gamma**2, n, tag="channel squared")
    err = restricted_block_error(w2, target, t + 1)
    return w2, BlockEncodingReport(
        alpha=gamma**2, ancillas=t + 1, measured_error=err, sector="all"
    )


def channel_operator(ch, n):
    """Dense ``O_mu = sum_xi lambda_xi n_(mu xi)``."""
    cr, _ = jw.jw_ladder_ops(n)
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    for xi in range(ch.rank):
        w = ch.rotation[:, xi]
        aw = sum(w[p] * cr[p] for p in range(n))
        out += ch.eigvals[xi] * (aw @ aw.conj().T).toarray()
    return out


# ---------------------------------------------------------------------------
# multiplexing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LCUBranch:
    """One multiplexed branch: coefficient, block-encoding unitary, its alpha."""

    omega: complex
    unitary: np.ndarray
    alpha: float


def lcu_multiplex(branches, n, selector_width=None, workspace=None, target=None,
                  sector=None):
    """Binary-multiplexed PREP-SELECT-PREP combination of branch encodings.

    PREP loads ``sqrt(|Omega_s| alpha_s / alpha)``; coefficient phases ride
    on the SELECT branches.  The encoded block is
    ``sum_s Omega_s L_s / alpha`` with ``alpha = sum_s |Omega_s| alpha_s``.
    """
    if not branches:
        raise ValidationError("at least one branch required")
    weights = np.array([abs(b.omega) * b.alpha for b in branches])
    alpha = float(weights.sum())
    if alpha <= 0:
        raise ValidationError("all branch weights vanish")
    width = selector_width
    if width is None:
        width = max(int(np.ceil(np.log2(len(branches)))), 0)
    if 2**width < len(branches):
        raise CapacityError(
            f"{len(branches)} branches exceed selector capacity 2**{width}"
        )
    amps = np.zeros(2**width)
    amps[: len(branches)] = np.sqrt(weights / alpha)
    phases = [
        b.omega / abs(b.omega) if abs(b.omega) > 0 else 1.0 for b in branches
    ]
    t_branches = max(
        int(np.log2(b.unitary.shape[0] // 2**n)) for b in branches
    )
    t = t_branches if workspace is None else workspace
    if width == 0 and t == t_branches:
        w = phases[0] * np.asarray(branches[0].unitary)
        w = _lift(w, t - int(np.log2(w.shape[0] // 2**n)))
    else:
        w = _prep_select_prep(
            amps, [b.unitary for b in branches], phases, n, workspace=t
        )
    err = float("nan")
    if target is not None:
        err = restricted_block_error(w, target, width + t, sector=sector)
    return w, BlockEncodingReport(
        alpha=alpha,
        ancillas=width + t,
        measured_error=err,
        sector="all" if sector is None else f"N={sector}",
    )


def mode_group_encoding(vectors, n, pivots=None, signs=None):
    """Encoding of ``sum_j sign_j n(w_j) / m`` over a small mode group.

    A single mode reduces to the flagged occupation gadget; two modes ride
    a one-qubit sub-selector with equal amplitudes, each realized through
    its own number-conserving ladder.  Exact on every particle sector.
    """
    m = vectors.shape[1]
    signs = [1.0] * m if signs is None else list(signs)
    if m == 1:
        pivot = None if pivots is None else pivots[0]
        return signs[0] * occupation_gadget(vectors[:, 0], n, pivot=pivot)
    amps = np.full(m, 1.0 / np.sqrt(m))
    ops = []
    for j in range(m):
        pivot = None if pivots is None else pivots[j]
        ops.append(occupation_gadget(vectors[:, j], n, pivot=pivot))
    return _prep_select_prep(amps, ops, signs, n, workspace=1)


def hamiltonian_branches(pool):
    """Branch list (coefficient, unitary, alpha) for a Hamiltonian pool."""
    n = pool.n_so
    out = []
    for lad in pool.one_body:
        w = mode_group_encoding(lad.vectors.astype(complex), n)
        out.append(LCUBranch(lad.coefficient, w, float(lad.multiplicity)))
    for lad in pool.channels:
        w, rep = channel_block_encoding(lad.channel, n, squared=True)
        out.append(LCUBranch(lad.coefficient, w, rep.alpha))
    return out


def hamiltonian_block_encoding(pool, sector=None, selector_width=None, workspace=None):
    """Full multiplexed encoding of the pool Hamiltonian (no constant shift)."""
    target = FockOperator(
        hamiltonian_from_pool(pool).matrix / pool.alpha, pool.n_so, tag="H/alpha"
    )
    sector = pool.n_elec if sector is None else sector
    return lcu_multiplex(
        hamiltonian_branches(pool),
        pool.n_so,
        selector_width=selector_width,
        workspace=workspace,
        target=target,
        sector=sector,
    )


def pair_branch_encoding(lad, n_occ, n, pivot_u=None, pivot_v=None):
    """Hermitian branch ``i(L - L^dag)/2`` for one pair ladder.

    Two-term sub-multiplex over the dyad encoding and its adjoint; the
    adjoint of the dyad gadget encodes the adjoint dyad, so both arms reuse
    one circuit body.
    """
    uv = np.zeros(len(ladders.pair_indices(n)), dtype=complex)
    vo = np.zeros_like(uv)
    for k, (a, b) in enumerate(ladders.pair_indices(len(lad.x))):
        uv[ladders.pair_position(n)[(n_occ + a, n_occ + b)]] = (
            lad.virtual_pair_vector()[k]
        )
    for k, (i, j) in enumerate(ladders.pair_indices(len(lad.r))):
        vo[ladders.pair_position(n)[(i, j)]] = lad.occupied_pair_vector()[k]
    w_l, _ = pair_dyad_block_encoding(uv, vo, 1.0, n, pivot_u=pivot_u, pivot_v=pivot_v)
    amps = np.array([1.0, 1.0]) / np.sqrt(2.0)
    return _prep_select_prep(
        amps, [w_l, w_l.conj().T], [1j, -1j], n, workspace=1
    )


def bilinear_branch_encoding(lad, n, pivots=None):
    """Hermitian branch ``i(L - L^dag)/Gamma`` for one bilinear ladder.

    The Hermitian form diagonalizes into at most two rotated occupation
    modes, each realized by a flagged one-electron ladder gadget under a
    one-qubit sub-selector.
    """
    w_vals, w_vecs = bilinear_asym_spectrum(lad.u, lad.v)
    r = len(w_vals)
    if r == 0:
        raise ValidationError("bilinear generator term vanishes")
    gamma = np.abs(w_vals).sum()
    a_r = max(int(np.ceil(np.log2(r))), 0) if r > 1 else 0
    amps = np.zeros(2**a_r)
    amps[:r] = np.sqrt(np.abs(w_vals) / gamma)
    ops = []
    phases = []
    for j in range(r):
        pivot = None if pivots is None else pivots[j]
        ops.append(occupation_gadget(w_vecs[:, j], n, pivot=pivot))
        phases.append(1.0 if w_vals[j] >= 0 else -1.0)
    if a_r == 0:
        return phases[0] * ops[0]
    return _prep_select_prep(amps, ops, phases, n, workspace=1)


def generator_branch_encoding(lad, n_occ, n, pivots=None):
    if lad.kind == "pair":
        pu = None if pivots is None else pivots.get("u")
        pv = None if pivots is None else pivots.get("v")
        return pair_branch_encoding(lad, n_occ, n, pivot_u=pu, pivot_v=pv)
    if lad.kind == "bilinear":
        pv = None if pivots is None else pivots.get("modes")
        return bilinear_branch_encoding(lad, n, pivots=pv)
    raise ValidationError(f"unsupported generator ladder kind {lad.kind!r}")


def generator_block_encoding(pool, mask_indices, alpha_bar=None, pivots=None,
                             selector_width=None, workspace=None):
    """Masked generator encoding with the global-normalization null branch.

    The block equals ``sum_(s in mask) omega_s i(L_s - L_s^dag) / alpha_bar``
    with ``alpha_bar`` fixed by the full compiled pool (never by the mask);
    surplus PREP amplitude is routed to the reserved address-0 null branch,
    whose workspace flip keeps it invisible to the ancilla-vacuum block.
    """
    mask_indices = frozenset(mask_indices)
    if pool.ell == 0 and mask_indices:
        raise MaskError("nonzero mask over an empty generator pool")
    addresses = {lad.address for lad in pool.ladders}
    if not mask_indices <= addresses:
        raise MaskError(
            f"mask indices {sorted(mask_indices - addresses)} not in pool"
        )
    alpha_bar = pool.alpha_bar if alpha_bar is None else float(alpha_bar)
    n = pool.n_so
    width = max(int(np.ceil(np.log2(pool.ell + 1))), 1)
    if selector_width is not None:
        if 2**selector_width < pool.ell + 1:
            raise CapacityError("selector width too small for the pool")
        width = selector_width
    amps = np.zeros(2**width)
    branch_ops = [None] * (pool.ell + 1)
    branch_phases = [1.0] * (pool.ell + 1)
    # null branch: identity on the system, flip on a workspace ancilla
    branch_ops[0] = np.kron(np.array([[0.0, 1.0], [1.0, 0.0]]), np.eye(2**n))
    used = 0.0
    for lad in pool.ladders:
        weight = abs(lad.coefficient) * generator_branch_alpha(lad)
        if lad.address in mask_indices:
            amps[lad.address] = np.sqrt(weight / alpha_bar)
            used += weight
        branch_pivots = None if pivots is None else pivots.get(lad.address)
        branch_ops[lad.address] = generator_branch_encoding(
            lad, pool.n_occ, n, pivots=branch_pivots
        )
        branch_phases[lad.address] = 1.0 if lad.coefficient >= 0 else -1.0
    if used > alpha_bar * (1 + 1e-12):
        raise ValidationError(
            f"masked weight {used} exceeds global normalization {alpha_bar}"
        )
    amps[0] = np.sqrt(max(1.0 - used / alpha_bar, 0.0))
    t = max(
        int(np.log2(op.shape[0] // 2**n)) for op in branch_ops if op is not None
    )
    if workspace is not None:
        if workspace < t:
            raise ShapeError("workspace narrower than the widest branch")
        t = workspace
    w = _prep_select_prep(amps, branch_ops, branch_phases, n, workspace=t)
    target = FockOperator(
        generator_dense(pool, mask_indices).matrix / alpha_bar, n, tag="A/alpha_bar"
    )
    sector = pool.n_elec if pool.n_elec is not None else pool.n_occ
    err = restricted_block_error(w, target, width + t, sector=sector)
    return w, BlockEncodingReport(
        alpha=alpha_bar,
        ancillas=width + t,
        measured_error=err,
        sector=f"N={sector}",
    )
