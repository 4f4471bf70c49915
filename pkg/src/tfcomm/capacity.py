"""Low-SNR noncoherent rate estimates for WSSUS channels.

When neither end knows the channel realization, the achievable rate at SNR
rho falls below the coherent AWGN value log(1 + rho) by a penalty that
integrates log(1 + rho * C(tau, nu)) over the scattering density.  The
profile grid stores cell masses, so the density is mass per cell area and
the integral is a Riemann sum on the grid.  Everything is in nats per
degree of freedom; bandwidth enters only through rho = power / bandwidth
in the sweep, which is where the characteristic interior rate maximum
appears.  The approximation is a low-SNR expansion and carries no asserted
error bar at moderate SNR.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel_models import ScatteringProfile

__all__ = [
    "CapacityQuery",
    "BandwidthSweepResult",
    "capacity_low_snr",
    "bandwidth_sweep",
]


@dataclass(frozen=True)
class CapacityQuery:
    """Scattering statistics plus SNR and physical grid cell sizes.

    ``delay_cell`` (seconds) and ``doppler_cell`` (Hz) give each grid cell
    its area; the defaults (1, 1/N) make the full grid cover unit-area-N,
    so a profile supported on K cells has support area K/N.
    """

    profile: ScatteringProfile
    snr: float
    delay_cell: float = 1.0
    doppler_cell: float | None = None

    def __post_init__(self):
        if not isinstance(self.profile, ScatteringProfile):
            raise TypeError("profile must be a ScatteringProfile")
        if self.snr <= 0:
            raise ValueError(f"snr must be positive, got {self.snr}")
        if self.doppler_cell is None:
            object.__setattr__(self, "doppler_cell", 1.0 / self.profile.n_dim)
        if self.delay_cell <= 0 or self.doppler_cell <= 0:
            raise ValueError("grid cell sizes must be positive")

    @property
    def cell_area(self) -> float:
        return self.delay_cell * self.doppler_cell

    @property
    def support_area(self) -> float:
        return self.profile.support_count * self.cell_area

    @property
    def awgn_reference(self) -> float:
        """Coherent AWGN rate log(1 + rho), nats per degree of freedom."""
        return float(np.log1p(self.snr))


def capacity_low_snr(query: CapacityQuery) -> tuple[float, float]:
    """(capacity, penalty) in nats per degree of freedom.

    penalty = sum over cells of log(1 + rho * mass / cell_area) * cell_area;
    capacity = log(1 + rho) - penalty.  The penalty vanishes with the
    profile and grows with both rho and the support area, so capacity never
    exceeds the AWGN reference.
    """
    area = query.cell_area
    masses = query.profile.intensities
    penalty = float(np.sum(np.log1p(query.snr * masses / area)) * area)
    return query.awgn_reference - penalty, penalty


@dataclass(frozen=True)
class BandwidthSweepResult:
    """Rate-versus-bandwidth curve at a fixed receive power budget."""

    bandwidths: np.ndarray
    snrs: np.ndarray
    capacities: np.ndarray
    penalties: np.ndarray
    rates: np.ndarray

    @property
    def best_index(self) -> int:
        return int(np.argmax(self.rates))

    @property
    def best_bandwidth(self) -> float:
        return float(self.bandwidths[self.best_index])

    @property
    def has_interior_maximum(self) -> bool:
        return 0 < self.best_index < self.bandwidths.size - 1

    def rows(self):
        """(bandwidth, snr, capacity, penalty, rate) tuples for CSV export."""
        return list(zip(self.bandwidths.tolist(), self.snrs.tolist(),
                        self.capacities.tolist(), self.penalties.tolist(),
                        self.rates.tolist()))


def bandwidth_sweep(profile: ScatteringProfile, power_budget: float, bandwidths,
                    delay_cell: float = 1.0,
                    doppler_cell: float | None = None) -> BandwidthSweepResult:
    """Total rate W * capacity(power_budget / W) over a bandwidth grid.

    Spreading the fixed power over more bandwidth lowers the per-dof SNR;
    the AWGN term saturates while the unknown-channel penalty keeps
    charging per dof, so on a wide enough grid the rate curve peaks at a
    finite interior bandwidth.
    """
    if power_budget <= 0:
        raise ValueError("power_budget must be positive")
    w = np.asarray(bandwidths, dtype=float).ravel()
    if w.size == 0 or np.any(w <= 0):
        raise ValueError("bandwidth grid must be nonempty and positive")
    if np.any(np.diff(w) <= 0):
        raise ValueError("bandwidth grid must be strictly increasing")
    caps = np.empty(w.size)
    pens = np.empty(w.size)
    for j, bw in enumerate(w):
        caps[j], pens[j] = capacity_low_snr(
            CapacityQuery(profile, power_budget / bw, delay_cell, doppler_cell))
    return BandwidthSweepResult(w, power_budget / w, caps, pens, w * caps)
