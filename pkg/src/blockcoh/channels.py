"""Kraus-set channels and classifiers for the block free-operation classes.

A channel is held as a finite set of d x d Kraus operators tied to a block
partition.  Three nested families of free operations are decided here:

* MBIO: the channel as a whole maps free (block-diagonal) states to free
  states.
* BIO: every single Kraus branch maps free states to free states, so block
  coherence is not created even probabilistically.
* SBIO: in addition every branch commutes with the block-dephasing map.

Each of the branch-level classes is decided two ways.  The semantic
classifiers quantify the defining condition over the elementary-matrix basis
of the relevant operator space (linearity makes the basis check complete).
The structural classifiers test the block sparsity pattern instead: at most
one nonzero block in each column partition for BIO, at most one per column
and per row partition for SBIO.  Structural membership implies semantic
membership; both are exposed so the implication can be checked rather than
assumed.

A constructor for physically realizable free channels is included: a free
ancilla state, a permutation-with-phases joint unitary and a block projective
measurement on the ancilla reduce to Kraus operators on the system.  Random
generators produce members of each class by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blockcore import (
    ZERO_TOL,
    BlockPartition,
    block_labels,
    block_mask,
)
from .sampling import as_rng, ginibre, haar_unitary

# Completeness tolerance for sum K^dag K = I.
CPTP_TOL = 1e-9
# Selective branches below this probability are dropped.
PROB_TOL = 1e-12

GEN_KINDS = ("bio", "sbio", "pbio", "unitary")


class PbioConstructionError(ValueError):
    """The requested recipe does not produce the promised block structure."""


@dataclass(eq=False)
class KrausSet:
    """A finite set of d x d Kraus operators tied to a block partition."""

    partition: BlockPartition
    operators: np.ndarray  # (n, d, d) complex

    def __post_init__(self):
        ops = np.asarray(self.operators, dtype=complex)
        if ops.ndim == 2:
            ops = ops[None, :, :]
        if ops.ndim != 3 or ops.shape[0] == 0:
            raise ValueError("need at least one Kraus operator")
        d = self.partition.total
        if ops.shape[1:] != (d, d):
            raise ValueError(
                f"operators must be {d}x{d} for partition {self.partition}, "
                f"got {ops.shape[1]}x{ops.shape[2]}"
            )
        self.operators = ops

    @property
    def dim(self) -> int:
        return self.partition.total

    @property
    def n_operators(self) -> int:
        return self.operators.shape[0]

    def __iter__(self):
        return iter(self.operators)

    def __len__(self):
        return self.n_operators


def cptp_deviation(ks: KrausSet) -> float:
    """Largest entry deviation of sum K^dag K from the identity."""
    total = np.einsum("nji,njk->ik", ks.operators.conj(), ks.operators)
    return float(np.max(np.abs(total - np.eye(ks.dim))))


def verify_cptp(ks: KrausSet, tol: float = CPTP_TOL) -> bool:
    """True when the Kraus set satisfies completeness within tol."""
    return cptp_deviation(ks) <= tol


def apply_channel(ks: KrausSet, rho) -> np.ndarray:
    """Full channel action sum_n K_n rho K_n^dag.

    The caller is responsible for verify_cptp; dimensions are checked here.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ks.dim, ks.dim):
        raise ValueError(f"state has shape {rho.shape}, expected ({ks.dim}, {ks.dim})")
    return np.einsum("nij,jk,nlk->il", ks.operators, rho, ks.operators.conj())


def apply_selective(ks: KrausSet, rho, prob_tol: float = PROB_TOL):
    """Measurement branches [(q_n, K_n rho K_n^dag / q_n)] with q_n > prob_tol."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ks.dim, ks.dim):
        raise ValueError(f"state has shape {rho.shape}, expected ({ks.dim}, {ks.dim})")
    branches = []
    for op in ks.operators:
        out = op @ rho @ op.conj().T
        q = float(np.trace(out).real)
        if q > prob_tol:
            branches.append((q, out / q))
    return branches


def block_pattern(op, partition: BlockPartition, tol: float = ZERO_TOL) -> np.ndarray:
    """Boolean (k, k) grid: True where the (row, col) block holds a nonzero entry.

    An entry is nonzero when it exceeds the scale-relative threshold of the
    whole operator.
    """
    op = np.asarray(op, dtype=complex)
    d = partition.total
    if op.shape != (d, d):
        raise ValueError(f"operator has shape {op.shape}, expected ({d}, {d})")
    thr = tol * (1.0 + (float(np.max(np.abs(op))) if op.size else 0.0))
    k = partition.num_blocks
    grid = np.zeros((k, k), dtype=bool)
    for r in range(k):
        rs = partition.block_slice(r)
        for c in range(k):
            cs = partition.block_slice(c)
            grid[r, c] = bool(np.max(np.abs(op[rs, cs])) > thr)
    return grid


def is_bio_structural(ks: KrausSet, tol: float = ZERO_TOL) -> bool:
    """Every operator has at most one nonzero block in each column partition."""
    for op in ks.operators:
        grid = block_pattern(op, ks.partition, tol)
        if np.any(grid.sum(axis=0) > 1):
            return False
    return True


def is_sbio_structural(ks: KrausSet, tol: float = ZERO_TOL) -> bool:
    """At most one nonzero block per column partition and per row partition."""
    for op in ks.operators:
        grid = block_pattern(op, ks.partition, tol)
        if np.any(grid.sum(axis=0) > 1) or np.any(grid.sum(axis=1) > 1):
            return False
    return True


def _same_block_pairs(partition: BlockPartition):
    for l in range(partition.num_blocks):
        sl = partition.block_slice(l)
        for x in range(sl.start, sl.stop):
            for y in range(sl.start, sl.stop):
                yield x, y


def _cross_block_pairs(partition: BlockPartition):
    labels = block_labels(partition)
    d = partition.total
    for x in range(d):
        for y in range(d):
            if labels[x] != labels[y]:
                yield x, y


def _pair_conjugation(ops: np.ndarray, x: int, y: int) -> np.ndarray:
    # K |x><y| K^dag for all operators at once: outer(col_x, conj(col_y))
    return ops[:, :, x][:, :, None] * ops[:, :, y].conj()[:, None, :]


def bio_semantic_deviation(ks: KrausSet) -> float:
    """Worst cross-block magnitude of K B K^dag over the diagonal-block basis."""
    off = ~block_mask(ks.partition)
    if not off.any():
        return 0.0
    worst = 0.0
    for x, y in _same_block_pairs(ks.partition):
        m = _pair_conjugation(ks.operators, x, y)
        worst = max(worst, float(np.max(np.abs(m[:, off]))))
    return worst


def is_bio_semantic(ks: KrausSet, tol: float = ZERO_TOL) -> bool:
    """Each branch leaves every diagonal-block basis element block-diagonal.

    Checks dephase(K B K^dag) == K B K^dag for every operator K and every
    elementary B = |x><y| with x, y in the same block.  By linearity this is
    equivalent to the same condition for the diagonal blocks of all states.
    """
    off = ~block_mask(ks.partition)
    if not off.any():
        return True
    for x, y in _same_block_pairs(ks.partition):
        m = _pair_conjugation(ks.operators, x, y)
        dev = float(np.max(np.abs(m[:, off])))
        if dev > tol * (1.0 + float(np.max(np.abs(m)))):
            return False
    return True


def sbio_semantic_deviation(ks: KrausSet) -> float:
    """Worst residual over both branch-level conditions of the strict class."""
    on = block_mask(ks.partition)
    worst = bio_semantic_deviation(ks)
    for x, y in _cross_block_pairs(ks.partition):
        m = _pair_conjugation(ks.operators, x, y)
        worst = max(worst, float(np.max(np.abs(m[:, on]))))
    return worst


def is_sbio_semantic(ks: KrausSet, tol: float = ZERO_TOL) -> bool:
    """BIO condition plus: branches annihilate every cross-block basis element.

    The extra requirement is dephase(K B' K^dag) == 0 for every elementary
    B' = |x><y| with x, y in different blocks, which by linearity is the same
    as each branch commuting with the block-dephasing map.
    """
    if not is_bio_semantic(ks, tol):
        return False
    on = block_mask(ks.partition)
    for x, y in _cross_block_pairs(ks.partition):
        m = _pair_conjugation(ks.operators, x, y)
        dev = float(np.max(np.abs(m[:, on])))
        if dev > tol * (1.0 + float(np.max(np.abs(m)))):
            return False
    return True


def mbio_deviation(ks: KrausSet) -> float:
    """Worst cross-block magnitude of the full channel output over the free basis."""
    off = ~block_mask(ks.partition)
    if not off.any():
        return 0.0
    worst = 0.0
    for x, y in _same_block_pairs(ks.partition):
        m = _pair_conjugation(ks.operators, x, y).sum(axis=0)
        worst = max(worst, float(np.max(np.abs(m[off]))))
    return worst


def is_mbio(ks: KrausSet, tol: float = ZERO_TOL) -> bool:
    """The summed channel maps every free-space basis element to a free operator."""
    off = ~block_mask(ks.partition)
    if not off.any():
        return True
    for x, y in _same_block_pairs(ks.partition):
        m = _pair_conjugation(ks.operators, x, y).sum(axis=0)
        dev = float(np.max(np.abs(m[off])))
        if dev > tol * (1.0 + float(np.max(np.abs(m)))):
            return False
    return True


def sbio_commutation_deviation(ks: KrausSet, rho) -> float:
    """Max entry of dephase(K rho K^dag) - K dephase(rho) K^dag over branches.

    ``rho`` may be a single (d, d) state or a batch (..., d, d).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (ks.dim, ks.dim):
        raise ValueError(f"state has shape {rho.shape}, expected (..., {ks.dim}, {ks.dim})")
    mask = block_mask(ks.partition)
    ops = ks.operators
    out = np.einsum("nij,...jk,nlk->...nil", ops, rho, ops.conj())
    lhs = out * mask
    rhs = np.einsum("nij,...jk,nlk->...nil", ops, rho * mask, ops.conj())
    return float(np.max(np.abs(lhs - rhs)))


def classifier_report(ks: KrausSet, tol: float = ZERO_TOL) -> dict:
    """All classifier verdicts for one Kraus set, as a JSON-ready dict."""
    return {
        "cptp": verify_cptp(ks),
        "mbio": is_mbio(ks, tol),
        "bio_structural": is_bio_structural(ks, tol),
        "bio_semantic": is_bio_semantic(ks, tol),
        "sbio_structural": is_sbio_structural(ks, tol),
        "sbio_semantic": is_sbio_semantic(ks, tol),
        "tolerance": float(tol),
    }


# ---------------------------------------------------------------------------
# Physically realizable free channels
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class PbioSpec:
    """Recipe for a physically built free channel.

    The ingredients are a free ancilla state (amplitudes over the ancilla
    basis, block structure given by ``ancilla_partition``), a joint unitary
    that permutes the product basis with phases, and a block projective
    measurement on the ancilla.  The permutation is stored through its two
    output components: product index (x, s) maps to
    (pi_system[x, s], pi_ancilla[x, s]).
    """

    system_partition: BlockPartition
    ancilla_partition: BlockPartition
    amplitudes: np.ndarray   # (d_B,) complex, unit norm
    pi_system: np.ndarray    # (d_A, d_B) int
    pi_ancilla: np.ndarray   # (d_A, d_B) int
    phases: np.ndarray       # (d_A, d_B) float

    def __post_init__(self):
        da = self.system_partition.total
        db = self.ancilla_partition.total
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(db)
        self.pi_system = np.asarray(self.pi_system, dtype=int)
        self.pi_ancilla = np.asarray(self.pi_ancilla, dtype=int)
        self.phases = np.asarray(self.phases, dtype=float)
        for name, arr in (
            ("pi_system", self.pi_system),
            ("pi_ancilla", self.pi_ancilla),
            ("phases", self.phases),
        ):
            if arr.shape != (da, db):
                raise ValueError(f"{name} must have shape ({da}, {db}), got {arr.shape}")

    def validate(self):
        """Raise ValueError when the permutation or normalization is broken."""
        da = self.system_partition.total
        db = self.ancilla_partition.total
        flat = self.pi_system * db + self.pi_ancilla
        if (
            self.pi_system.min() < 0
            or self.pi_system.max() >= da
            or self.pi_ancilla.min() < 0
            or self.pi_ancilla.max() >= db
            or not np.array_equal(np.sort(flat.ravel()), np.arange(da * db))
        ):
            raise ValueError("permutation is not a bijection on the product basis")
        norm_dev = abs(float(np.sum(np.abs(self.amplitudes) ** 2)) - 1.0)
        if norm_dev > 1e-12:
            raise ValueError(f"ancilla amplitudes are not normalized (off by {norm_dev:.3e})")


def has_scaled_isometry_blocks(ks: KrausSet, tol: float = ZERO_TOL) -> bool:
    """Each nonzero block of each operator factors as scalar x unitary x projector.

    Concretely B^dag B must be diagonal with all nonzero diagonal entries
    equal, which is what the physical construction promises block by block.
    """
    p = ks.partition
    for op in ks.operators:
        grid = block_pattern(op, p, tol)
        for r in range(p.num_blocks):
            for c in range(p.num_blocks):
                if not grid[r, c]:
                    continue
                blk = op[p.block_slice(r), p.block_slice(c)]
                gram = blk.conj().T @ blk
                thr = tol * (1.0 + float(np.max(np.abs(gram))))
                offdiag = gram - np.diag(np.diag(gram))
                if float(np.max(np.abs(offdiag))) > thr:
                    return False
                diag = np.diag(gram).real
                live = diag[diag > thr]
                if live.size and float(live.max() - live.min()) > thr:
                    return False
    return True


def build_pbio(spec: PbioSpec) -> KrausSet:
    """Reduce a physical recipe to Kraus operators on the system.

    For each ancilla measurement index j the operator collects the terms

        K_j = sum_{s, x : pi_ancilla[x, s] = j}
              amplitudes[s] * exp(i phases[x, s]) |pi_system[x, s]><x|

    Operators that vanish identically (measurement outcomes that never fire)
    are dropped.  The result is checked to be complete, to carry at most one
    nonzero block per row and per column partition, and to factor block-wise
    as scalar x unitary x projector; a recipe that breaks any of these raises
    PbioConstructionError rather than returning a channel outside the class.
    """
    spec.validate()
    da = spec.system_partition.total
    db = spec.ancilla_partition.total
    kraus = np.zeros((db, da, da), dtype=complex)
    coeff = spec.amplitudes[None, :] * np.exp(1j * spec.phases)
    for x in range(da):
        for s in range(db):
            j = spec.pi_ancilla[x, s]
            kraus[j, spec.pi_system[x, s], x] += coeff[x, s]
    keep = [j for j in range(db) if np.max(np.abs(kraus[j])) > 0.0]
    ks = KrausSet(spec.system_partition, kraus[keep])
    dev = cptp_deviation(ks)
    if dev > CPTP_TOL:
        raise PbioConstructionError(f"construction is not complete (deviation {dev:.3e})")
    if not is_sbio_structural(ks):
        raise PbioConstructionError(
            "permutation does not respect the product block structure: an operator "
            "has more than one nonzero block in a row or column partition"
        )
    if not has_scaled_isometry_blocks(ks):
        raise PbioConstructionError(
            "a nonzero block does not factor as scalar x unitary x projector"
        )
    return ks


# ---------------------------------------------------------------------------
# Random generation
# ---------------------------------------------------------------------------

def _nullspace(constraints: np.ndarray, dim: int) -> np.ndarray:
    # Orthonormal basis of {w : constraints @ w = 0} in C^dim.
    if constraints.shape[0] == 0:
        return np.eye(dim, dtype=complex)
    u, s, vh = np.linalg.svd(constraints)
    cutoff = (s[0] if s.size else 0.0) * 1e-12
    rank = int(np.sum(s > cutoff))
    return vh[rank:].conj().T


def _kraus_from_block_patterns(partition: BlockPartition, patterns, rng) -> np.ndarray:
    """Fill a legal block pattern with Gaussian blocks and make it complete.

    ``patterns[n][c]`` lists the row blocks operator n may occupy in column
    block c.  Completeness is equivalent to the stacked (n_ops*d, d) matrix of
    all operators having orthonormal columns, so each column block is drawn
    from the orthogonal complement of the previously fixed columns inside its
    own permitted row support.  Raises RuntimeError when a pattern leaves a
    column block with too little support to complete.
    """
    d = partition.total
    n_ops = len(patterns)
    stacked = np.zeros((n_ops * d, d), dtype=complex)
    accepted = np.zeros((n_ops * d, 0), dtype=complex)
    for c in range(partition.num_blocks):
        rows = []
        for n, pat in enumerate(patterns):
            for r in pat[c]:
                sl = partition.block_slice(r)
                rows.extend(range(n * d + sl.start, n * d + sl.stop))
        rows = np.array(rows, dtype=int)
        dc = partition.dims[c]
        basis = _nullspace(accepted[rows, :].conj().T, len(rows))
        if basis.shape[1] < dc:
            raise RuntimeError(f"pattern leaves column block {c} infeasible")
        w = basis @ ginibre(rng, basis.shape[1], dc)
        q, _ = np.linalg.qr(w)
        cs = partition.block_slice(c)
        stacked[np.ix_(rows, range(cs.start, cs.stop))] = q
        widened = np.zeros((n_ops * d, dc), dtype=complex)
        widened[rows, :] = q
        accepted = np.concatenate([accepted, widened], axis=1)
    return stacked.reshape(n_ops, d, d)


def _bio_patterns(partition: BlockPartition, n_ops: int, rng):
    # One row block per column partition, merges allowed.
    k = partition.num_blocks
    return [
        [[int(rng.integers(k))] for _ in range(k)]
        for _ in range(n_ops)
    ]


def _sbio_patterns(partition: BlockPartition, n_ops: int, rng):
    # One row block per column partition, distinct rows within each operator.
    k = partition.num_blocks
    return [[[int(r)] for r in rng.permutation(k)] for _ in range(n_ops)]


def _size_preserving_block_permutation(partition: BlockPartition, rng) -> np.ndarray:
    tau = np.arange(partition.num_blocks)
    by_size = {}
    for idx, size in enumerate(partition.dims):
        by_size.setdefault(size, []).append(idx)
    for group in by_size.values():
        shuffled = rng.permutation(group)
        for src, dst in zip(group, shuffled):
            tau[src] = dst
    return tau


def _random_pbio_spec(partition: BlockPartition, rng) -> PbioSpec:
    # Ancilla: a small random partition with the free state in one block.
    anc = BlockPartition([int(x) for x in rng.integers(1, 4, size=int(rng.integers(1, 4)))])
    da, db = partition.total, anc.total
    b0 = int(rng.integers(anc.num_blocks))
    b0_slice = anc.block_slice(b0)
    amps = np.zeros(db, dtype=complex)
    g = ginibre(rng, anc.dims[b0])
    amps[b0_slice] = g / np.linalg.norm(g)
    # Permutation: identity everywhere except on ancilla indices in block b0,
    # where each system block a maps onto a same-sized block tau(a) while the
    # ancilla index is permuted inside b0.  This respects the product block
    # structure, so the reduction below stays inside the strict class.
    tau = _size_preserving_block_permutation(partition, rng)
    pi_sys = np.tile(np.arange(da)[:, None], (1, db))
    pi_anc = np.tile(np.arange(db)[None, :], (da, 1))
    for a in range(partition.num_blocks):
        src = partition.block_slice(a)
        dst_off = partition.offsets[tau[a]]
        alpha = rng.permutation(partition.dims[a])
        beta = rng.permutation(anc.dims[b0])
        for xl, x in enumerate(range(src.start, src.stop)):
            for sl, s in enumerate(range(b0_slice.start, b0_slice.stop)):
                pi_sys[x, s] = dst_off + alpha[xl]
                pi_anc[x, s] = b0_slice.start + beta[sl]
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(da, db))
    return PbioSpec(partition, anc, amps, pi_sys, pi_anc, phases)


def gen_random(kind: str, partition: BlockPartition, seed: int) -> KrausSet:
    """Deterministic random channel of the requested class.

    ``kind`` is one of 'bio', 'sbio', 'pbio' or 'unitary'.  The output always
    satisfies completeness exactly (up to rounding) and the structural
    classifier of its class by construction.  The same (kind, partition, seed)
    triple reproduces the same operators bit for bit.
    """
    if kind not in GEN_KINDS:
        raise ValueError(f"unknown channel class {kind!r}, expected one of {GEN_KINDS}")
    rng = as_rng(seed)
    d = partition.total
    if kind == "unitary":
        return KrausSet(partition, haar_unitary(d, rng)[None, :, :])
    if kind == "pbio":
        return build_pbio(_random_pbio_spec(partition, rng))
    n_ops = d + int(rng.integers(0, 3))
    sampler = _bio_patterns if kind == "bio" else _sbio_patterns
    checker = is_bio_structural if kind == "bio" else is_sbio_structural
    for _ in range(32):
        patterns = sampler(partition, n_ops, rng)
        try:
            ops = _kraus_from_block_patterns(partition, patterns, rng)
        except RuntimeError:
            continue
        ks = KrausSet(partition, ops)
        if verify_cptp(ks) and checker(ks):
            return ks
    raise RuntimeError(f"could not generate a {kind} set for partition {partition}")


def gen_pattern_violating(kind: str, partition: BlockPartition, seed: int) -> KrausSet:
    """Complete Kraus set engineered to break the pattern rule of its class.

    For 'bio' one operator receives two nonzero blocks in a single column
    partition.  For 'sbio' one operator sends two column partitions into the
    same row partition, which stays inside the plain class but leaves the
    strict one.  Needs a partition with at least two blocks.
    """
    if kind not in ("bio", "sbio"):
        raise ValueError(f"no pattern-violating generator for class {kind!r}")
    k = partition.num_blocks
    if k < 2:
        raise ValueError("a single-block partition admits no violating pattern")
    rng = as_rng(seed)
    n_ops = partition.total + int(rng.integers(0, 3))
    for _ in range(32):
        if kind == "bio":
            patterns = _bio_patterns(partition, n_ops, rng)
            r1 = patterns[0][0][0]
            r2 = int(rng.integers(k - 1))
            patterns[0][0] = [r1, r2 + (r2 >= r1)]
        else:
            patterns = _sbio_patterns(partition, n_ops, rng)
            patterns[0][1] = list(patterns[0][0])
        try:
            ops = _kraus_from_block_patterns(partition, patterns, rng)
        except RuntimeError:
            continue
        ks = KrausSet(partition, ops)
        broken = is_bio_structural(ks) if kind == "bio" else is_sbio_structural(ks)
        if verify_cptp(ks) and not broken:
            return ks
    raise RuntimeError(f"could not generate a {kind}-violating set for {partition}")
