"""Weyl-Heisenberg (Gabor) systems on the cyclic group of order N.

A system is generated by translating a window along a separable lattice:
g_{n,k}[i] = g[(i - n*a) mod N] * exp(2j*pi*k*b*i/N) with a | N and b | N.
The frame operator, its extreme eigenvalues, canonical dual and tight
windows, and the Wexler-Raz duality test against the adjoint lattice
(time step N/b, frequency step N/a) are all computed densely; exactness is
preferred over speed at the dimensions this package targets (N <= 512).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .tf_core import DiscreteChannel, centered_index

__all__ = [
    "NotAFrameError",
    "WHGrid",
    "Pulse",
    "FrameReport",
    "as_samples",
    "tf_shift_samples",
    "lattice_matrix",
    "frame_operator",
    "frame_bounds",
    "dual_window",
    "tight_window",
    "check_wexler_raz",
    "localization_metrics",
    "gaussian_pulse",
    "rect_pulse",
    "write_pulse_csv",
    "read_pulse_csv",
]


class NotAFrameError(Exception):
    """The lattice translates of the window do not span with positive lower bound."""


@dataclass(frozen=True)
class WHGrid:
    """Separable time-frequency lattice with steps (time_step, freq_step)."""

    n_dim: int
    time_step: int
    freq_step: int

    def __post_init__(self):
        for name in ("n_dim", "time_step", "freq_step"):
            val = getattr(self, name)
            if int(val) != val or val < 1:
                raise ValueError(f"{name} must be a positive integer, got {val}")
            object.__setattr__(self, name, int(val))
        if self.n_dim % self.time_step:
            raise ValueError(f"time_step {self.time_step} does not divide N = {self.n_dim}")
        if self.n_dim % self.freq_step:
            raise ValueError(f"freq_step {self.freq_step} does not divide N = {self.n_dim}")

    @property
    def n_time(self) -> int:
        return self.n_dim // self.time_step

    @property
    def n_freq(self) -> int:
        return self.n_dim // self.freq_step

    @property
    def size(self) -> int:
        return self.n_time * self.n_freq

    @property
    def redundancy(self) -> float:
        return self.n_dim / (self.time_step * self.freq_step)

    @property
    def tf_product(self) -> float:
        """Lattice cell area divided by N; frames require tf_product <= 1."""
        return self.time_step * self.freq_step / self.n_dim

    def adjoint(self) -> "WHGrid":
        """The dual lattice (time step N/b, frequency step N/a)."""
        return WHGrid(self.n_dim, self.n_dim // self.freq_step, self.n_dim // self.time_step)


@dataclass(frozen=True)
class Pulse:
    """A length-N window with cached l2 norm."""

    samples: np.ndarray
    norm: float = field(init=False)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim != 1 or s.size == 0:
            raise ValueError(f"pulse samples must be a nonempty vector, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise ValueError("pulse samples contain non-finite entries")
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "norm", float(np.linalg.norm(s)))

    @property
    def n_dim(self) -> int:
        return self.samples.size

    def __len__(self) -> int:
        return self.samples.size

    def normalized(self) -> "Pulse":
        if self.norm == 0.0:
            raise ValueError("cannot normalize a zero pulse")
        return Pulse(self.samples / self.norm)


@dataclass(frozen=True)
class FrameReport:
    """Extreme frame bounds and derived flags."""

    lower_bound: float
    upper_bound: float
    is_frame: bool
    is_tight: bool
    condition: float


def as_samples(pulse) -> np.ndarray:
    if isinstance(pulse, Pulse):
        return pulse.samples
    return Pulse(np.asarray(pulse)).samples


def tf_shift_samples(samples, time_shift: int, freq_shift: int) -> np.ndarray:
    """Lattice-style shift: delay then modulate with positive-frequency phase."""
    x = np.asarray(samples, dtype=complex)
    n = x.size
    phase = np.exp(2j * np.pi * int(freq_shift) * np.arange(n) / n)
    return phase * np.roll(x, int(time_shift))


def lattice_matrix(pulse, grid: WHGrid) -> np.ndarray:
    """All lattice translates as columns, column index n * (N/b) + k."""
    g = as_samples(pulse)
    if g.size != grid.n_dim:
        raise ValueError(f"pulse length {g.size} does not match grid N = {grid.n_dim}")
    n = grid.n_dim
    rolls = np.stack([np.roll(g, t * grid.time_step) for t in range(grid.n_time)])
    phases = np.exp(2j * np.pi * np.outer(np.arange(grid.n_freq) * grid.freq_step,
                                          np.arange(n)) / n)
    cols = rolls[:, None, :] * phases[None, :, :]
    return np.ascontiguousarray(cols.reshape(grid.size, n).T)


def frame_operator(pulse, grid: WHGrid) -> DiscreteChannel:
    """S = sum over the lattice of g_{n,k} g_{n,k}^H."""
    mat = lattice_matrix(pulse, grid)
    return DiscreteChannel(mat @ mat.conj().T)


def _frame_eigensystem(pulse, grid: WHGrid):
    evals, evecs = np.linalg.eigh(frame_operator(pulse, grid).matrix)
    return np.maximum(evals, 0.0), evecs


FRAME_RANK_RTOL = 1e-10


def frame_bounds(pulse, grid: WHGrid, tight_rtol: float = 1e-9) -> FrameReport:
    """Extreme eigenvalues of the frame operator via dense Hermitian solve."""
    evals, _ = _frame_eigensystem(pulse, grid)
    lower = float(evals[0])
    upper = float(evals[-1])
    is_frame = upper > 0.0 and lower > FRAME_RANK_RTOL * upper
    is_tight = is_frame and (upper / lower - 1.0) <= tight_rtol
    condition = upper / lower if is_frame else float("inf")
    return FrameReport(lower, upper, is_frame, is_tight, condition)


def dual_window(pulse, grid: WHGrid) -> Pulse:
    """Canonical dual window, the frame operator inverse applied to g."""
    evals, evecs = _frame_eigensystem(pulse, grid)
    if evals[-1] <= 0.0 or evals[0] <= FRAME_RANK_RTOL * evals[-1]:
        raise NotAFrameError(
            f"window does not generate a frame on {grid}: "
            f"extreme eigenvalues ({evals[0]:.3e}, {evals[-1]:.3e})")
    g = as_samples(pulse)
    return Pulse(evecs @ ((evecs.conj().T @ g) / evals))


def tight_window(pulse, grid: WHGrid) -> Pulse:
    """Canonical tight window S^(-1/2) g, whose frame bounds are both 1."""
    evals, evecs = _frame_eigensystem(pulse, grid)
    if evals[-1] <= 0.0 or evals[0] <= FRAME_RANK_RTOL * evals[-1]:
        raise NotAFrameError(
            f"window does not generate a frame on {grid}: "
            f"extreme eigenvalues ({evals[0]:.3e}, {evals[-1]:.3e})")
    g = as_samples(pulse)
    return Pulse(evecs @ ((evecs.conj().T @ g) / np.sqrt(evals)))


def check_wexler_raz(pulse, dual, grid: WHGrid, tol: float = 1e-10) -> tuple[bool, float]:
    """Duality on the lattice against biorthogonality on the adjoint lattice.

    Returns (dual_frames, biorthogonality_defect).  The first entry tests
    sum_{n,k} <x, gamma_{n,k}> g_{n,k} == x directly as a matrix identity.
    The second is the largest deviation of the adjoint-lattice cross Gram
    from (a*b/N) times the identity; the two criteria agree (Wexler-Raz).
    """
    mat_g = lattice_matrix(pulse, grid)
    mat_d = lattice_matrix(dual, grid)
    recon = mat_g @ mat_d.conj().T
    is_dual = bool(np.abs(recon - np.eye(grid.n_dim)).max() <= tol)
    adj = grid.adjoint()
    adj_g = lattice_matrix(pulse, adj)
    adj_d = lattice_matrix(dual, adj)
    gram = adj_d.conj().T @ adj_g
    constant = grid.time_step * grid.freq_step / grid.n_dim
    defect = float(np.abs(gram - constant * np.eye(adj.size)).max())
    return is_dual, defect


def _circular_spread(weights: np.ndarray) -> float:
    n = weights.size
    total = weights.sum()
    p = weights / total
    mean_phasor = np.sum(p * np.exp(2j * np.pi * np.arange(n) / n))
    center = n * np.angle(mean_phasor) / (2 * np.pi) if np.abs(mean_phasor) > 1e-12 else 0.0
    dist = (np.arange(n) - center + n / 2) % n - n / 2
    return float(np.sqrt(np.sum(p * dist**2)))


def localization_metrics(pulse) -> tuple[float, float]:
    """Circular second-moment spreads (time in samples, frequency in bins)."""
    g = as_samples(pulse)
    energy = np.abs(g) ** 2
    if energy.sum() == 0.0:
        raise ValueError("cannot localize a zero pulse")
    return _circular_spread(energy), _circular_spread(np.abs(np.fft.fft(g)) ** 2)


def gaussian_pulse(n_dim: int, time_step: int | None = None,
                   freq_step: int | None = None, sigma: float | None = None) -> Pulse:
    """Periodized Gaussian window, unit norm.

    ``sigma`` is the width in samples of exp(-pi*t^2/sigma^2).  The default
    sqrt(a*N/b) matches the window's time/frequency spread ratio to the
    grid aspect a/b; with no grid given it falls back to sqrt(N).
    """
    n = int(n_dim)
    if n < 1:
        raise ValueError("dimension must be positive")
    if sigma is None:
        if time_step is not None and freq_step is not None:
            sigma = np.sqrt(time_step * n / freq_step)
        else:
            sigma = np.sqrt(n)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    i = centered_index(np.arange(n), n).astype(float)
    wraps = max(1, int(np.ceil(6.0 * sigma / n)))
    g = np.zeros(n)
    for r in range(-wraps, wraps + 1):
        g += np.exp(-np.pi * (i + r * n) ** 2 / sigma**2)
    return Pulse(g / np.linalg.norm(g))


def rect_pulse(n_dim: int, length: int, offset: int = 0) -> Pulse:
    """Unit-norm rectangular window on [offset, offset + length) mod N."""
    n = int(n_dim)
    if not 1 <= length <= n:
        raise ValueError(f"length must be in [1, {n}], got {length}")
    g = np.zeros(n, dtype=complex)
    g[(int(offset) + np.arange(length)) % n] = 1.0 / np.sqrt(length)
    return Pulse(g)


def write_pulse_csv(path, pulse) -> None:
    """Export window samples as rows (index, re, im)."""
    g = as_samples(pulse)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "re", "im"])
        for idx, val in enumerate(g):
            writer.writerow([idx, repr(float(val.real)), repr(float(val.imag))])


def read_pulse_csv(path) -> Pulse:
    """Read a window exported by :func:`write_pulse_csv`."""
    rows = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["index", "re", "im"]:
            raise ValueError(f"{Path(path).name}: expected header index,re,im")
        for row in reader:
            rows[int(row["index"])] = float(row["re"]) + 1j * float(row["im"])
    n = len(rows)
    if n == 0 or sorted(rows) != list(range(n)):
        raise ValueError(f"{Path(path).name}: indices must cover 0..N-1")
    return Pulse(np.array([rows[i] for i in range(n)]))
