"""Periodic spectral grids on [-L, L)^d and field I/O.

Nodes x_j = -L + j h with h = 2L/n; frequencies xi_k = k/(2L) in FFT
order. Forward/inverse transforms approximate the continuous pair
F f(xi) = int e^{-i 2 pi xi x} f dx on the box, and a characteristic
function synthesizes its density through p = F phi. Multiplier
application needs no boundary phases and works directly on FFT
coefficients.

Binary dump format (LVF1): magic "LVF1", uint32 dim, dim x uint32 n,
float64 L, then the values row-major as little-endian float64.
"""

import os
import struct
import tempfile

import numpy as np

from .errors import DomainError

_MAGIC = b"LVF1"


class SpectralGrid:
    def __init__(self, dim: int, n: int, L: float):
        if dim not in (1, 2):
            raise DomainError("grids support dim 1 and 2")
        if n < 8 or (n & (n - 1)) != 0:
            raise DomainError("n must be a power of two, at least 8")
        if L <= 0:
            raise DomainError("L must be positive")
        self.dim = dim
        self.n = int(n)
        self.L = float(L)
        self.h = 2.0 * L / n
        self.x_axis = -L + self.h * np.arange(n)
        self.xi_axis = np.fft.fftfreq(n, d=self.h)
        m = np.rint(self.xi_axis * 2.0 * L).astype(np.int64)
        self._sign_axis = 1.0 - 2.0 * (np.abs(m) % 2)

    def __repr__(self):
        return f"SpectralGrid(dim={self.dim}, n={self.n}, L={self.L:g})"

    @property
    def shape(self):
        return (self.n,) * self.dim

    @property
    def cell(self) -> float:
        return self.h ** self.dim

    def x_mesh(self):
        if self.dim == 1:
            return self.x_axis
        a, b = np.meshgrid(self.x_axis, self.x_axis, indexing="ij")
        return np.stack([a, b], axis=-1)

    def xi_mesh(self):
        if self.dim == 1:
            return self.xi_axis
        a, b = np.meshgrid(self.xi_axis, self.xi_axis, indexing="ij")
        return np.stack([a, b], axis=-1)

    def _sign(self):
        if self.dim == 1:
            return self._sign_axis
        return np.multiply.outer(self._sign_axis, self._sign_axis)

    # -- continuous-pair transforms --------------------------------------

    def forward(self, values: np.ndarray) -> np.ndarray:
        """Box approximation of F f at the frequency lattice."""
        return self.cell * self._sign() * np.fft.fftn(values)

    def inverse(self, fhat: np.ndarray) -> np.ndarray:
        return np.fft.ifftn(fhat * self._sign()) / self.cell

    def synthesize_cf(self, phi: np.ndarray) -> np.ndarray:
        """Density of a characteristic function: p = F phi on the nodes."""
        dxi = 1.0 / (2.0 * self.L) ** self.dim
        return np.fft.fftn(phi * self._sign()) * dxi

    def analyze_cf(self, values: np.ndarray) -> np.ndarray:
        """Characteristic function of a density given on the nodes."""
        return self.cell * self._sign() * (self.n ** self.dim) * \
            np.fft.ifftn(values)

    # -- multiplier calculus ---------------------------------------------

    def apply_multiplier(self, field: np.ndarray, mult: np.ndarray,
                         real: bool = True) -> np.ndarray:
        out = np.fft.ifftn(np.fft.fftn(field) * mult)
        return out.real if real else out

    def shift(self, field: np.ndarray, delta) -> np.ndarray:
        """field(x + delta) by spectral phase (exact for lattice shifts)."""
        delta = np.atleast_1d(np.asarray(delta, dtype=float))
        xi = self.xi_mesh()
        phase = np.exp(2j * np.pi * (xi * delta if self.dim == 1
                                     else xi @ delta))
        return self.apply_multiplier(field, phase)

    def gradient_mult(self, axis: int = 0) -> np.ndarray:
        xi = self.xi_mesh()
        comp = xi if self.dim == 1 else xi[..., axis]
        return 2j * np.pi * comp

    def integral(self, values: np.ndarray) -> float:
        return float(np.sum(values) * self.cell)

    def lp_norm(self, values: np.ndarray, p: float = 2.0) -> float:
        return float((np.sum(np.abs(values) ** p) * self.cell) ** (1.0 / p))


# ---------------------------------------------------------------------------
# field dumps


def atomic_write(path: str, data: bytes) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-lvf-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_field(path: str, grid: SpectralGrid, values: np.ndarray) -> None:
    values = np.ascontiguousarray(values, dtype="<f8")
    if values.shape != grid.shape:
        raise DomainError(f"values shape {values.shape} != grid {grid.shape}")
    head = _MAGIC + struct.pack("<I", grid.dim)
    head += struct.pack(f"<{grid.dim}I", *grid.shape)
    head += struct.pack("<d", grid.L)
    atomic_write(path, head + values.tobytes())


def read_field(path: str) -> tuple[SpectralGrid, np.ndarray]:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != _MAGIC:
        raise DomainError(f"{path}: not an LVF1 dump")
    (dim,) = struct.unpack_from("<I", raw, 4)
    off = 8
    ns = struct.unpack_from(f"<{dim}I", raw, off)
    off += 4 * dim
    (L,) = struct.unpack_from("<d", raw, off)
    off += 8
    if len(set(ns)) != 1:
        raise DomainError("anisotropic node counts not supported")
    grid = SpectralGrid(dim, ns[0], L)
    count = int(np.prod(ns))
    values = np.frombuffer(raw, dtype="<f8", count=count, offset=off)
    return grid, values.reshape(grid.shape).copy()


def write_field_csv(path: str, grid: SpectralGrid, values: np.ndarray) -> None:
    if grid.dim != 1:
        raise DomainError("CSV output is one-dimensional only")
    buf = "".join(f"{float(x)!r},{float(v)!r}\n"
                  for x, v in zip(grid.x_axis, values))
    atomic_write(path, buf.encode())
