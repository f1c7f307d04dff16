"""Vectorised arithmetic in O_k / p^k O_k for an odd inert prime p.

An element ``a + b*omega`` is held as a pair of integer arrays reduced mod
``q = p^k``.  Everything here is exact integer arithmetic on numpy int64.
"""

from __future__ import annotations

import numpy as np

from .quadfield import KElement


class ResidueRing:
    def __init__(self, delta: int, p: int, k: int):
        self.delta = delta
        self.p = p
        self.k = k
        self.q = p**k
        self.nw = (delta * delta - delta) // 4  # norm of omega
        if self.q**2 * (abs(delta) + self.nw + 2) >= 2**62:
            raise OverflowError("modulus too large for int64 residue arithmetic")

    def reduce_elt(self, x: KElement) -> tuple[int, int]:
        if not x.is_integral():
            raise ValueError(f"{x} is not integral")
        return (int(x.a) % self.q, int(x.b) % self.q)

    def mul(self, a1, b1, a2, b2):
        q = self.q
        bb = (b1 * b2) % q
        ra = (a1 * a2 - bb * self.nw) % q
        rb = (a1 * b2 + a2 * b1 + bb * self.delta) % q
        return ra, rb

    def conj(self, a, b):
        return (a + b * self.delta) % self.q, (-b) % self.q

    def norm(self, a, b):
        q = self.q
        return (a * a + self.delta * ((a * b) % q) + self.nw * ((b * b) % q)) % q

    def all_elements(self):
        r = np.arange(self.q, dtype=np.int64)
        a, b = np.meshgrid(r, r, indexing="ij")
        return a.ravel(), b.ravel()

    def vectors(self, m: int, start: int, stop: int):
        """Vectors of (O/q)^m with indices in [start, stop), as arrays of shape (stop - start, m)."""
        return self.decode(m, np.arange(start, stop, dtype=np.int64))

    def decode(self, m: int, idx: np.ndarray):
        """Vectors from their mixed-radix indices (a_0, b_0, a_1, b_1, ... in base q)."""
        idx = np.asarray(idx, dtype=np.int64).copy()
        a = np.empty((len(idx), m), dtype=np.int64)
        b = np.empty((len(idx), m), dtype=np.int64)
        for i in range(m):
            a[:, i] = idx % self.q
            idx //= self.q
            b[:, i] = idx % self.q
            idx //= self.q
        return a, b

    def all_vectors(self, m: int):
        return self.vectors(m, 0, self.q ** (2 * m))


def valuation_array(x: np.ndarray, p: int, cap: int) -> np.ndarray:
    """p-adic valuation of each integer entry, with 0 mapped to ``cap``."""
    v = np.zeros(x.shape, dtype=np.int64)
    y = x.copy()
    live = y != 0
    v[~live] = cap
    for _ in range(cap):
        div = live & (y % p == 0)
        if not div.any():
            break
        v[div] += 1
        y[div] //= p
        live = div
    return np.minimum(v, cap)
