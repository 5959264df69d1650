"""Static device parameters for the two-spin double-quantum-dot system.

All frequencies are stored internally as angular frequencies (rad/s).
Constructors accept cyclic values (Hz, i.e. the "value/2pi" numbers usually
quoted for these devices) and multiply by 2*pi once, so the rest of the
code never has to guess which convention a number is in.
"""
from __future__ import annotations

import dataclasses
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

TWO_PI = 2.0 * math.pi

# j / (delta_ez + delta_ez1) above this is outside the weak-exchange regime
# the block-reduction formulas assume; flagged but not rejected.
EXCHANGE_RATIO_WARN = 0.3

_CYCLIC_KEYS = ("bz_ext", "delta_ez", "bz_l0", "by_l0", "by_r0", "j", "ez1",
                "delta_ez1")


@dataclass(frozen=True)
class DeviceParams:
    """Device operating point, in angular frequency units (rad/s).

    Attributes
    ----------
    bz_ext : float
        Homogeneous external field along z.
    delta_ez : float
        Zeeman splitting difference between the dots (right minus left).
    bz_l0 : float
        Static local z-field on the left dot.
    by_l0, by_r0 : float
        Static transverse (y) fields on the left/right dot.
    j : float
        Exchange coupling while the gate window is on.
    ez1, delta_ez1 : float
        Mean and differential Zeeman shifts that appear when the exchange
        is pulsed on; both are modeled as zero when the exchange is off.
    phi : float
        Carrier phase of the microwave drive (rad).
    """

    bz_ext: float
    delta_ez: float
    bz_l0: float
    by_l0: float
    by_r0: float
    j: float
    ez1: float
    delta_ez1: float
    phi: float = 3.0 * math.pi / 2.0

    def __post_init__(self):
        if not self.j > 0.0:
            raise ValueError(f"exchange coupling must be positive, got {self.j}")
        if not self.delta_ez + self.delta_ez1 > 0.0:
            raise ValueError("delta_ez + delta_ez1 must be positive")
        ratio = self.j / (self.delta_ez + self.delta_ez1)
        if ratio > EXCHANGE_RATIO_WARN:
            warnings.warn(
                f"j/(delta_ez+delta_ez1) = {ratio:.3f} exceeds "
                f"{EXCHANGE_RATIO_WARN}; the weak-exchange block reduction "
                "is unreliable here",
                stacklevel=2,
            )

    # -- derived quantities -------------------------------------------------

    @property
    def bz_r0(self) -> float:
        """Static local z-field on the right dot."""
        return self.bz_l0 + self.delta_ez

    @property
    def ez(self) -> float:
        """Mean Zeeman splitting bz_ext + (bz_r0 + bz_l0)/2."""
        return self.bz_ext + 0.5 * (self.bz_r0 + self.bz_l0)

    @property
    def zeeman_gap(self) -> float:
        """delta_ez + delta_ez1, the gap the exchange competes against."""
        return self.delta_ez + self.delta_ez1

    # -- constructors / serialization ---------------------------------------

    @classmethod
    def from_cyclic(cls, *, bz_ext, delta_ez, bz_l0, by_l0, by_r0, j, ez1,
                    delta_ez1, phi=3.0 * math.pi / 2.0) -> "DeviceParams":
        """Build from cyclic frequencies in Hz (phase still in rad)."""
        return cls(
            bz_ext=TWO_PI * bz_ext,
            delta_ez=TWO_PI * delta_ez,
            bz_l0=TWO_PI * bz_l0,
            by_l0=TWO_PI * by_l0,
            by_r0=TWO_PI * by_r0,
            j=TWO_PI * j,
            ez1=TWO_PI * ez1,
            delta_ez1=TWO_PI * delta_ez1,
            phi=phi,
        )

    def to_dict(self) -> dict:
        """Flat dict with cyclic values in MHz, phase in rad."""
        out = {k: getattr(self, k) / TWO_PI / 1e6 for k in _CYCLIC_KEYS}
        out["phi"] = self.phi
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "DeviceParams":
        """Inverse of :meth:`to_dict` (MHz cyclic values, phase in rad)."""
        missing = [k for k in _CYCLIC_KEYS if k not in d]
        if missing:
            raise ValueError(f"missing parameter keys: {missing}")
        kwargs = {k: float(d[k]) * 1e6 for k in _CYCLIC_KEYS}
        return cls.from_cyclic(phi=float(d.get("phi", 3.0 * math.pi / 2.0)),
                               **kwargs)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "DeviceParams":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def replace(self, **changes) -> "DeviceParams":
        """Return a copy with the given angular-frequency fields replaced."""
        return dataclasses.replace(self, **changes)


def default_params() -> DeviceParams:
    """Measured operating point of the reference device.

    Values are the published cyclic frequencies: bz_ext = 14 GHz,
    delta_ez = 214 MHz, bz_l0 = 4.287 GHz, by_l0 = 5 MHz, by_r0 = 55 MHz,
    j = 19.7 MHz, ez1 = 29.23 MHz, delta_ez1 = -46.94 MHz, with equal drive
    amplitude on both dots and carrier phase phi = 3*pi/2.
    """
    return DeviceParams.from_cyclic(
        bz_ext=14e9,
        delta_ez=214e6,
        bz_l0=4.287e9,
        by_l0=5e6,
        by_r0=55e6,
        j=19.7e6,
        ez1=29.23e6,
        delta_ez1=-46.94e6,
        phi=3.0 * math.pi / 2.0,
    )
