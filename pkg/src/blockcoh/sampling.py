"""Seeded random ensembles: states, unitaries, POVMs and dense channels."""

from __future__ import annotations

import numpy as np

from .blockcore import BlockPartition, block_dephase


def as_rng(seed) -> np.random.Generator:
    """Pass through a Generator, otherwise seed a fresh one."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ginibre(rng: np.random.Generator, *shape) -> np.ndarray:
    """Standard complex Gaussian array."""
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_density_matrix(dim: int, seed=None) -> np.ndarray:
    """Hilbert-Schmidt random state: G G^dag normalized, G square Ginibre."""
    rng = as_rng(seed)
    g = ginibre(rng, dim, dim)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_block_incoherent_state(partition: BlockPartition, seed=None) -> np.ndarray:
    """Random free state: a Hilbert-Schmidt state with cross blocks erased."""
    return block_dephase(partition, random_density_matrix(partition.total, seed))


def haar_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase correction."""
    rng = as_rng(seed)
    q, r = np.linalg.qr(ginibre(rng, dim, dim))
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_povm(dim: int, n_effects: int, seed=None) -> np.ndarray:
    """n Wishart-like positive blocks normalized so they sum to identity."""
    rng = as_rng(seed)
    raw = []
    for _ in range(n_effects):
        g = ginibre(rng, dim, dim)
        raw.append(g @ g.conj().T)
    total = np.sum(raw, axis=0)
    vals, vecs = np.linalg.eigh(total)
    inv_sqrt = (vecs / np.sqrt(vals)) @ vecs.conj().T
    return np.array([inv_sqrt @ w @ inv_sqrt for w in raw])


def random_cptp(dim: int, n_ops: int, seed=None) -> np.ndarray:
    """Dense random channel: slices of a Haar isometry, so sum K^dag K = I."""
    rng = as_rng(seed)
    iso = haar_unitary(dim * n_ops, rng)[:, :dim]
    return iso.reshape(n_ops, dim, dim)
