"""Multi-cell geometry, large-scale fading and system constants.

Indexing convention used across the package: ``beta[j, l, k]`` is the
attenuation from BS ``j`` to user ``k`` of cell ``l``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .config import ExperimentConfig

__all__ = [
    "ScenarioError",
    "SystemConstants",
    "Geometry",
    "LargeScaleFading",
    "NetworkScenario",
    "PLACEMENT_MODES",
    "DEFAULT_BS_POSITIONS",
    "db_to_linear",
    "dbm_to_watts",
    "linear_to_db",
    "circle_placement",
    "pathloss_beta",
    "build_scenario",
]

PLACEMENT_MODES = ("equally-spaced-circle", "random-circle", "explicit")

DEFAULT_BS_POSITIONS = (
    (0.0, 0.0, 0.0),
    (525.0, 0.0, 0.0),
    (0.0, 525.0, 0.0),
    (525.0, 525.0, 0.0),
)


class ScenarioError(ValueError):
    """Raised for physically inconsistent scenario inputs."""


def db_to_linear(x_db):
    """Convert dB (power ratio, or dB relative to 1 W) to linear scale."""
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def dbm_to_watts(x_dbm):
    """Convert dBm to watts."""
    return 10.0 ** ((np.asarray(x_dbm, dtype=float) - 30.0) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class SystemConstants:
    """Scalar constants shared by every cell.

    Parameters
    ----------
    L, M, K : int
        Cells, BS antennas, users per cell.  ``M`` may be a float when the
        closed forms are evaluated on a continuous antenna axis.
    P_t : float
        Average downlink transmit power per BS [W].
    sigma2 : float
        Thermal noise power at the users [W].
    rho_p : float
        Uplink pilot SNR (linear).
    """

    L: int
    M: float
    K: int
    P_t: float
    sigma2: float
    rho_p: float

    def __post_init__(self):
        if self.L < 1:
            raise ScenarioError(f"L must be >= 1, got {self.L}")
        if self.K < 1:
            raise ScenarioError(f"K must be >= 1, got {self.K}")
        if self.K > self.M:
            raise ScenarioError(f"K={self.K} exceeds M={self.M}")
        if not self.P_t > 0:
            raise ScenarioError(f"P_t must be positive, got {self.P_t}")
        if not self.sigma2 > 0:
            raise ScenarioError(f"sigma2 must be positive, got {self.sigma2}")
        if not self.rho_p >= 0:
            raise ScenarioError(f"rho_p must be nonnegative, got {self.rho_p}")

    @property
    def c(self) -> float:
        """Load ratio M/K."""
        return self.M / self.K

    @property
    def tau_p(self) -> int:
        return self.K

    @property
    def eta(self) -> float:
        """Power normalization P_t/M for a one-bit (unit-modulus) signal."""
        return self.P_t / self.M


@dataclass(frozen=True)
class Geometry:
    bs_positions: np.ndarray  # (L, 3)
    user_positions: np.ndarray  # (L, K, 3)
    placement_mode: str = "equally-spaced-circle"
    circle_radius: float | None = None

    def __post_init__(self):
        bs = np.asarray(self.bs_positions, dtype=float)
        users = np.asarray(self.user_positions, dtype=float)
        if bs.ndim != 2 or bs.shape[1] != 3:
            raise ScenarioError(f"bs_positions must be (L, 3), got {bs.shape}")
        if users.ndim != 3 or users.shape[0] != bs.shape[0] or users.shape[2] != 3:
            raise ScenarioError(
                f"user_positions must be (L, K, 3) with L={bs.shape[0]}, got {users.shape}"
            )
        if self.placement_mode not in PLACEMENT_MODES:
            raise ScenarioError(f"unknown placement mode {self.placement_mode!r}")
        bs.flags.writeable = False
        users.flags.writeable = False
        object.__setattr__(self, "bs_positions", bs)
        object.__setattr__(self, "user_positions", users)

    @property
    def distances(self) -> np.ndarray:
        """``d[j, l, k]``: distance from BS j to user k of cell l."""
        diff = self.bs_positions[:, None, None, :] - self.user_positions[None]
        return np.linalg.norm(diff, axis=-1)


@dataclass(frozen=True)
class LargeScaleFading:
    beta: np.ndarray  # (L, L, K)
    alpha: float = 3.0
    pathloss_const: float = 1e-3

    def __post_init__(self):
        beta = np.array(self.beta, dtype=float)
        if beta.ndim != 3 or beta.shape[0] != beta.shape[1]:
            raise ScenarioError(f"beta must have shape (L, L, K), got {beta.shape}")
        if not np.all(np.isfinite(beta)) or np.any(beta <= 0):
            raise ScenarioError("beta entries must be finite and strictly positive")
        beta.flags.writeable = False
        object.__setattr__(self, "beta", beta)

    @property
    def own(self) -> np.ndarray:
        """``beta[j, j, k]`` as an (L, K) array."""
        idx = np.arange(self.beta.shape[0])
        return self.beta[idx, idx]


@dataclass(frozen=True)
class NetworkScenario:
    constants: SystemConstants
    fading: LargeScaleFading
    geometry: Geometry | None = field(default=None, compare=False)

    def __post_init__(self):
        L, K = self.constants.L, self.constants.K
        if self.fading.beta.shape != (L, L, K):
            raise ScenarioError(
                f"beta shape {self.fading.beta.shape} inconsistent with L={L}, K={K}"
            )

    @property
    def beta(self) -> np.ndarray:
        return self.fading.beta

    @property
    def L(self) -> int:
        return self.constants.L

    @property
    def M(self):
        return self.constants.M

    @property
    def K(self) -> int:
        return self.constants.K

    def with_constants(self, **changes) -> "NetworkScenario":
        """Copy with some system constants replaced (e.g. ``M`` or ``P_t``)."""
        return replace(self, constants=replace(self.constants, **changes))

    @classmethod
    def from_beta(cls, beta, *, M, P_t, sigma2, rho_p, alpha=3.0, pathloss_const=1e-3):
        """Scenario from an explicit (L, L, K) attenuation array."""
        fading = LargeScaleFading(beta, alpha=alpha, pathloss_const=pathloss_const)
        L, _, K = fading.beta.shape
        constants = SystemConstants(L=L, M=M, K=K, P_t=P_t, sigma2=sigma2, rho_p=rho_p)
        return cls(constants=constants, fading=fading)


def circle_placement(bs_positions, K, radius, *, mode="equally-spaced-circle",
                     angular_offset=0.0, rng=None):
    """Place K users per cell on a circle around each BS.

    ``equally-spaced-circle`` uses angles ``offset + 2*pi*k/K`` in every
    cell; ``random-circle`` draws i.i.d. uniform angles from ``rng``.
    """
    bs = np.asarray(bs_positions, dtype=float)
    L = bs.shape[0]
    if mode == "equally-spaced-circle":
        angles = np.broadcast_to(angular_offset + 2 * np.pi * np.arange(K) / K, (L, K))
    elif mode == "random-circle":
        if rng is None:
            raise ScenarioError("random-circle placement needs an rng")
        angles = rng.uniform(0.0, 2 * np.pi, size=(L, K))
    else:
        raise ScenarioError(f"circle placement does not support mode {mode!r}")
    offsets = np.zeros((L, K, 3))
    offsets[..., 0] = radius * np.cos(angles)
    offsets[..., 1] = radius * np.sin(angles)
    return bs[:, None, :] + offsets


def pathloss_beta(distances, alpha=3.0, pathloss_const=1e-3):
    """``pathloss_const / d**alpha``, elementwise."""
    d = np.asarray(distances, dtype=float)
    if np.any(d <= 0):
        raise ScenarioError("user coincides with a BS (non-positive distance)")
    return pathloss_const / d ** alpha


def build_scenario(config: "ExperimentConfig", *, P_t: float | None = None,
                   M: float | None = None) -> NetworkScenario:
    """Build the scenario described by an experiment config.

    ``P_t`` defaults to the first entry of the config's power grid and ``M``
    to the scenario block's antenna count; sweeps pass explicit values.
    """
    from .channel import RngStream, PLACEMENT

    sc, pw = config.scenario, config.power
    sigma2 = float(dbm_to_watts(pw.sigma2_dbm))
    rho_p = 1.0 / sigma2 if pw.rho_p == "inverse-noise" else float(pw.rho_p)
    if P_t is None:
        P_t = float(db_to_linear(pw.pt_db[0])) if pw.pt_db else 1.0
    M = sc.M if M is None else M

    if sc.beta is not None:
        fading = LargeScaleFading(sc.beta, alpha=sc.alpha, pathloss_const=sc.pathloss_const)
        geometry = None
    else:
        bs = np.asarray(sc.bs_positions if sc.bs_positions is not None
                        else DEFAULT_BS_POSITIONS[: sc.L], dtype=float)
        if sc.placement_mode == "explicit":
            if sc.user_positions is None:
                raise ScenarioError("explicit placement requires user_positions")
            users = np.asarray(sc.user_positions, dtype=float)
        else:
            rng = RngStream(config.mc.seed, (PLACEMENT,)).generator()
            users = circle_placement(bs, sc.K, sc.circle_radius, mode=sc.placement_mode,
                                     angular_offset=sc.angular_offset, rng=rng)
        geometry = Geometry(bs, users, sc.placement_mode, sc.circle_radius)
        fading = LargeScaleFading(
            pathloss_beta(geometry.distances, sc.alpha, sc.pathloss_const),
            alpha=sc.alpha, pathloss_const=sc.pathloss_const,
        )

    L = fading.beta.shape[0]
    constants = SystemConstants(L=L, M=M, K=sc.K, P_t=P_t, sigma2=sigma2, rho_p=rho_p)
    return NetworkScenario(constants=constants, fading=fading, geometry=geometry)
