"""Seeded random inputs shared by the test modules."""

import numpy as np

from kdq.hilbert import overlaps, random_basis, random_density, random_hermitian


def basis_pair(d, rng, min_overlap=0.05):
    """Random basis pair whose overlaps all have modulus >= min_overlap."""
    while True:
        A = random_basis(d, rng, "A")
        B = random_basis(d, rng, "B")
        if np.abs(overlaps(A, B)).min() >= min_overlap:
            return A, B


def kd_corpus(n=100, dims=(2, 3, 4, 8), seed=1):
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n):
        d = dims[k % len(dims)]
        A, B = basis_pair(d, rng)
        rank = None if k % 3 else 1
        out.append((random_density(d, rng, rank), A, B))
    return out


def triple(d, rng, min_overlap=0.02):
    while True:
        A, B, C = (random_basis(d, rng, lbl) for lbl in "ABC")
        if min(np.abs(overlaps(P, Q)).min() for P, Q in ((A, B), (B, C), (A, C))) >= min_overlap:
            return A, B, C


__all__ = ["basis_pair", "kd_corpus", "triple", "random_hermitian"]
