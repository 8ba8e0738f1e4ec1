"""Ramanujan tau(n) from the q-expansion of Delta = q prod (1 - q^n)^24.

The product is evaluated exactly with one big integer: Jacobi's identity gives
prod (1 - q^n)^3 = sum_k (-1)^k (2k+1) q^{k(k+1)/2}, which is packed into a
single gmpy2 integer with a fixed number of bits per coefficient (Kronecker
substitution).  Three truncated squarings then produce the 24th power.
"""

from __future__ import annotations

import math

import gmpy2
import numpy as np


def _slot_bytes(M: int) -> int:
    # |tau(n)| <= d(n) n^{11/2}; intermediate powers have smaller coefficients
    bits = 5.5 * math.log2(max(M, 2)) + 2.0 * math.log2(max(M, 2)) ** 0.5 + 16
    return max(16, int(math.ceil(bits / 8.0)) + 1)


def _pack(values, positions, M: int, nb: int):
    buf = np.zeros(M * nb, dtype=np.uint8)
    for pos, c in zip(positions.tolist(), values.tolist()):
        buf[pos * nb : (pos + 1) * nb] = np.frombuffer(int(c).to_bytes(nb, "little"), dtype=np.uint8)
    return gmpy2.from_binary(b"\x01\x01" + buf.tobytes())


class TauExpansion:
    """Exact coefficients of prod_{n>=1} (1 - q^n)^24 up to q^{M-1}.

    tau(n) is the coefficient of q^{n-1}, so n ranges over 1..M.
    """

    def __init__(self, M: int):
        if M < 1:
            raise ValueError("M must be positive")
        self.M = int(M)
        nb = _slot_bytes(self.M)
        self.nbytes = nb
        k = np.arange(0, math.isqrt(2 * self.M) + 2, dtype=np.int64)
        pos = k * (k + 1) // 2
        keep = pos < self.M
        k, pos = k[keep], pos[keep]
        c = (2 * k + 1) * np.where(k % 2 == 0, 1, -1)
        val = _pack(c[c > 0], pos[c > 0], self.M, nb) - _pack(-c[c < 0], pos[c < 0], self.M, nb)
        mask = (gmpy2.mpz(1) << (8 * nb * self.M)) - 1
        for _ in range(3):
            val = (val * val) & mask
        raw = gmpy2.to_binary(val)[2:]
        buf = np.zeros(self.M * nb, dtype=np.uint8)
        buf[: len(raw)] = np.frombuffer(raw, dtype=np.uint8)
        self._buf = buf
        self._half = 1 << (8 * nb - 1)
        self._full = 1 << (8 * nb)

    def _chunk(self, i: int) -> int:
        nb = self.nbytes
        return int.from_bytes(self._buf[i * nb : (i + 1) * nb].tobytes(), "little")

    def coefficient(self, i: int) -> int:
        """Coefficient of q^i in prod (1 - q^n)^24."""
        if not 0 <= i < self.M:
            raise IndexError(i)
        u = self._chunk(i)
        # a negative neighbour below borrowed one from this slot
        if i > 0 and self._chunk(i - 1) >= self._half:
            u += 1
        if u >= self._half:
            u -= self._full
        return u

    def tau(self, n: int) -> int:
        return self.coefficient(n - 1)


def ramanujan_tau(n_values, M: int | None = None) -> list[int]:
    n_values = [int(n) for n in n_values]
    if not n_values:
        return []
    exp = TauExpansion(M or max(n_values))
    return [exp.tau(n) for n in n_values]


def normalized_tau(tau_p: int, p: int) -> float:
    """tau(p) / p^{11/2} with a single rounding before the final sqrt."""
    return (tau_p / p**5) / math.sqrt(p)
