"""Seeded, portable random number generation for synthetic fixtures.

The generator is PCG32 (``pcg32_srandom_r`` / ``pcg32_random_r`` from the PCG
reference implementation): a 64-bit LCG with multiplier 6364136223846793005
and an XSH-RR output permutation to 32 bits.  A given ``(seed, stream)`` pair
yields the same u32 sequence on every platform, so fixtures and oracles can be
regenerated exactly anywhere; tests/test_prng.py pins reference outputs.

Derived values are defined on top of the raw u32 stream and are part of the
generation contract:

* uniforms: ``(u32 + 0.5) * 2**-32``, strictly inside (0, 1);
* normals: Box-Muller on consecutive uniform pairs ``(u1, u2)``, emitting
  ``sqrt(-2 ln u1) * cos(2 pi u2)`` then ``sqrt(-2 ln u1) * sin(2 pi u2)``;
  an odd request consumes a full final pair and drops its second half.

The u32 stream is bit-exact everywhere.  The derived doubles go through libm
(log/cos/sin) and may differ in the last ulp across math libraries; within one
platform they are deterministic.
"""
from __future__ import annotations

import numpy as np

_MULT = 6364136223846793005
_MASK64 = (1 << 64) - 1

# Block-jump tables: _A_POW[k] = MULT**k mod 2**64 and
# _C_MULT[k] = (1 + MULT + ... + MULT**(k-1)) mod 2**64, so that
# state_k = _A_POW[k] * state_0 + _C_MULT[k] * inc.  Seed-independent,
# computed once.
_BLOCK = 8192
_A_POW: np.ndarray | None = None
_C_MULT: np.ndarray | None = None


def _jump_tables() -> tuple[np.ndarray, np.ndarray]:
    global _A_POW, _C_MULT
    if _A_POW is None:
        a = np.empty(_BLOCK + 1, dtype=np.uint64)
        c = np.empty(_BLOCK + 1, dtype=np.uint64)
        ak, ck = 1, 0
        for k in range(_BLOCK + 1):
            a[k] = ak
            c[k] = ck
            ck = (ck + ak) & _MASK64
            ak = (ak * _MULT) & _MASK64
        _A_POW, _C_MULT = a, c
    return _A_POW, _C_MULT


class Pcg32:
    """One PCG32 sequence, selected by ``seed`` and an odd-increment ``stream``.

    Bulk draws are produced in blocks via the LCG's closed-form jump, which is
    bit-identical to stepping the scalar recurrence.
    """

    def __init__(self, seed: int, stream: int = 0):
        self._inc = (((stream << 1) | 1) & _MASK64)
        self._state = 0
        self._step()
        self._state = (self._state + (seed & _MASK64)) & _MASK64
        self._step()

    def _step(self) -> int:
        old = self._state
        self._state = (old * _MULT + self._inc) & _MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & 0xFFFFFFFF
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & 0xFFFFFFFF

    def next_u32(self) -> int:
        """Draw a single 32-bit output."""
        return self._step()

    def u32(self, n: int) -> np.ndarray:
        """Draw ``n`` outputs as a uint32 array."""
        a_pow, c_mult = _jump_tables()
        out = np.empty(n, dtype=np.uint32)
        inc = np.uint64(self._inc)
        done = 0
        while done < n:
            take = min(_BLOCK, n - done)
            s = np.uint64(self._state)
            states = a_pow[:take] * s + c_mult[:take] * inc
            xorshifted = (((states >> np.uint64(18)) ^ states) >> np.uint64(27)).astype(
                np.uint32
            )
            rot = (states >> np.uint64(59)).astype(np.uint32)
            out[done : done + take] = (xorshifted >> rot) | (
                xorshifted << ((np.uint32(32) - rot) & np.uint32(31))
            )
            self._state = (
                int(a_pow[take]) * self._state + int(c_mult[take]) * self._inc
            ) & _MASK64
            done += take
        return out

    def uniforms(self, n: int) -> np.ndarray:
        """Draw ``n`` doubles uniformly in the open interval (0, 1)."""
        return (self.u32(n).astype(np.float64) + 0.5) * 2.0**-32

    def normals(self, n: int) -> np.ndarray:
        """Draw ``n`` standard normal doubles via Box-Muller."""
        pairs = (n + 1) // 2
        u = self.uniforms(2 * pairs)
        r = np.sqrt(-2.0 * np.log(u[0::2]))
        theta = (2.0 * np.pi) * u[1::2]
        out = np.empty(2 * pairs, dtype=np.float64)
        out[0::2] = r * np.cos(theta)
        out[1::2] = r * np.sin(theta)
        return out[:n]
