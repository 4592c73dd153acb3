"""Symmetric Toeplitz matrices with FFT matvec via circulant embedding.

A symmetric Toeplitz matrix is stored as its first row (the "symbol"),
which needs O(m) memory.  Matrix-vector products go through a circulant
embedding of size >= 2m (rounded up to a power of two) and cost
O(m log m); the spectrum of the embedding is computed once and cached.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

# Below this dimension a dense matvec beats the FFT round trip.
DENSE_MATVEC_CUTOFF = 64

# Safety cap for dense materialization.
DENSE_CAP = 8192


class SymToeplitz:
    """Symmetric Toeplitz matrix; entry (i, j) equals symbol[|i - j|]."""

    def __init__(self, symbol):
        symbol = np.ascontiguousarray(symbol, dtype=np.float64)
        if symbol.ndim != 1 or symbol.size == 0:
            raise ValueError("symbol must be a nonempty 1-D array")
        self.symbol = symbol
        self.m = symbol.size
        self.shape = (self.m, self.m)
        # Lazy state: spectrum of the circulant embedding, prefix sums,
        # dense copy for small m.  All write-once, so concurrent readers
        # at worst duplicate work.
        self._spectrum = None
        self._pad = 0
        self._prefix = None
        self._dense = None

    def _embed_spectrum(self, pad=None):
        if pad is None:
            pad = 1 << int(2 * self.m - 1).bit_length()
            if pad < 2 * self.m:
                pad *= 2
        t = self.symbol
        col = np.zeros(pad)
        col[: self.m] = t
        col[pad - self.m + 1 :] = t[1:][::-1]
        return pad, np.fft.rfft(col)

    def matvec(self, x, pad=None):
        """Return T @ x using the cached circulant spectrum."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.m,):
            raise ValueError(f"expected vector of length {self.m}, got {x.shape}")
        if pad is None and self.m <= DENSE_MATVEC_CUTOFF:
            return self.to_dense() @ x
        if pad is not None:
            p, spec = self._embed_spectrum(pad)
        else:
            if self._spectrum is None:
                self._pad, self._spectrum = self._embed_spectrum()
            p, spec = self._pad, self._spectrum
        y = np.fft.irfft(spec * np.fft.rfft(x, n=p), n=p)
        return y[: self.m]

    def __matmul__(self, x):
        return self.matvec(x)

    def to_dense(self):
        """Materialize the full (m, m) array.  Cached for reuse."""
        if self.m > DENSE_CAP:
            raise ValueError(f"dense cap exceeded: m={self.m} > {DENSE_CAP}")
        if self._dense is None:
            self._dense = scipy.linalg.toeplitz(self.symbol)
        return self._dense

    def row_sum(self, i):
        """Exact sum of row i, O(1) after a one-time prefix-sum pass."""
        if not 0 <= i < self.m:
            raise IndexError(f"row index {i} out of range for m={self.m}")
        if self._prefix is None:
            self._prefix = np.cumsum(self.symbol)
        p = self._prefix
        return p[i] + p[self.m - 1 - i] - p[0]

    def row_sums(self):
        """All row sums as a vector."""
        if self._prefix is None:
            self._prefix = np.cumsum(self.symbol)
        p = self._prefix
        idx = np.arange(self.m)
        return p[idx] + p[self.m - 1 - idx] - p[0]

    @property
    def diag(self):
        return self.symbol[0]

    def scaled(self, c):
        return SymToeplitz(c * self.symbol)

    def __repr__(self):
        return f"SymToeplitz(m={self.m}, t0={self.symbol[0]:.6g})"


def identity_symbol(m):
    t = np.zeros(m)
    t[0] = 1.0
    return SymToeplitz(t)
