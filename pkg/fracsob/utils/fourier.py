"""
Discrete Fourier transforms in the unitary convention.

The continuous transform is u_hat(xi) = (2 pi)^(-n/2) * integral u(x) exp(-i xi.x) dx.
On a grid with spacing h and N nodes per axis the discrete version samples xi on
the band 2 pi * fftfreq(N, h), carries the phase of the box origin, and satisfies
the discrete Plancherel identity sum |u|^2 h^n = sum |u_hat|^2 (d xi)^n.
"""

from typing import List, Tuple

import numpy as np
import scipy.fft as fft

from ..models.grid import Grid


def frequency_axes(grid: Grid) -> List[np.ndarray]:
    return [2.0 * np.pi * fft.fftfreq(grid.n_pts, d=h) for h in grid.spacing]


def frequency_steps(grid: Grid) -> np.ndarray:
    return 2.0 * np.pi / (grid.n_pts * grid.spacing)


def frequency_mesh(grid: Grid) -> Tuple[np.ndarray, ...]:
    return tuple(np.meshgrid(*frequency_axes(grid), indexing="ij"))


def frequency_norm(grid: Grid) -> np.ndarray:
    """|xi| on the frequency grid."""
    return np.sqrt(sum(k ** 2 for k in frequency_mesh(grid)))


def _phase(grid: Grid) -> np.ndarray:
    phase = np.ones(grid.shape, dtype=complex)
    for xi, origin in zip(frequency_mesh(grid), grid.lo):
        phase = phase * np.exp(-1j * xi * origin)
    return phase


def unitary_fft(values: np.ndarray, grid: Grid) -> np.ndarray:
    scale = np.prod(grid.spacing) * (2.0 * np.pi) ** (-grid.dim / 2.0)
    return scale * _phase(grid) * fft.fftn(values)


def unitary_ifft(transform: np.ndarray, grid: Grid) -> np.ndarray:
    scale = np.prod(grid.spacing) * (2.0 * np.pi) ** (-grid.dim / 2.0)
    return fft.ifftn(transform / (scale * _phase(grid)))


def apply_multiplier(values: np.ndarray, symbol: np.ndarray) -> np.ndarray:
    """Real part of ifft(symbol * fft(values)); the unitary scaling cancels."""
    return np.real(fft.ifftn(symbol * fft.fftn(values)))
