"""
Application traffic profiles.

Each profile is a parametric byte-arrival generator for one application or
activity. Shapes follow what the radio throughput of each family looks like:
video streaming oscillates, OTT sessions rise and fall over the session,
calls are flat, and shopping sessions open with a heavy page load that decays
while the user clicks around.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError
from .radio import Direction, QosClass, standard_qos


class Shape(Enum):
    SINUSOIDAL = "Sinusoidal"
    CONVEX = "Convex"
    LINEAR = "Linear"
    BURSTY_DECAY = "BurstyDecay"


@dataclass(frozen=True)
class DirectionParams:
    base_rate: float
    amplitude: float = 0.0
    period: int = 1
    noise_std: float = 0.0
    persistent_rbs: int = 0
    burst_probability: float = 0.0
    burst_bytes: float = 0.0

    def __post_init__(self) -> None:
        if self.base_rate < 0:
            raise ConfigurationError("base_rate must be non-negative", context="profile.base_rate")
        if self.amplitude < 0 or self.noise_std < 0 or self.burst_bytes < 0:
            raise ConfigurationError(
                "amplitude, noise_std and burst_bytes must be non-negative", context="profile")
        if self.period < 1:
            raise ConfigurationError("period must be at least 1 subframe", context="profile.period")
        if self.persistent_rbs < 0:
            raise ConfigurationError("persistent_rbs must be non-negative", context="profile.persistent_rbs")
        if not 0.0 <= self.burst_probability <= 1.0:
            raise ConfigurationError(
                "burst_probability outside [0, 1]", context="profile.burst_probability")

    def scaled(self, factor: float) -> DirectionParams:
        """Same shape with every byte quantity multiplied by `factor`."""
        return DirectionParams(
            base_rate=self.base_rate * factor,
            amplitude=self.amplitude * factor,
            period=self.period,
            noise_std=self.noise_std * factor,
            persistent_rbs=self.persistent_rbs,
            burst_probability=self.burst_probability,
            burst_bytes=self.burst_bytes * factor,
        )


@dataclass(frozen=True)
class AppProfile:
    class_label: str
    shape: Shape
    uplink: DirectionParams
    downlink: DirectionParams
    qos: QosClass

    def __post_init__(self) -> None:
        if not self.class_label:
            raise ConfigurationError("Profile needs a class label", context="profile.class_label")
        for params in (self.uplink, self.downlink):
            if self.shape is Shape.SINUSOIDAL and params.period < 2:
                raise ConfigurationError(
                    f"Sinusoidal profile '{self.class_label}' needs period >= 2", context="profile.period")
            if self.qos.is_gbr and params.persistent_rbs <= 0:
                raise ConfigurationError(
                    f"GBR profile '{self.class_label}' needs persistent_rbs in both directions",
                    context="profile.persistent_rbs")

    def params(self, direction: Direction) -> DirectionParams:
        return self.uplink if direction is Direction.UPLINK else self.downlink

    def scaled(self, factor: float) -> AppProfile:
        return AppProfile(self.class_label, self.shape, self.uplink.scaled(factor),
                          self.downlink.scaled(factor), self.qos)


def _envelope(shape: Shape, params: DirectionParams, subframes: np.ndarray) -> np.ndarray:
    t = subframes.astype(np.float64)
    match shape:
        case Shape.SINUSOIDAL:
            return params.base_rate + params.amplitude * np.sin(2.0 * np.pi * t / params.period)
        case Shape.CONVEX:
            u = np.mod(t, params.period) / params.period
            return params.base_rate + params.amplitude * 4.0 * u * (1.0 - u)
        case Shape.LINEAR:
            return np.full(t.shape, float(params.base_rate))
        case Shape.BURSTY_DECAY:
            return params.base_rate + params.amplitude * np.power(0.5, t / params.period)
        case _:
            raise ConfigurationError(f"Unknown shape {shape}", context="profile.shape")


def arrival_series(profile: AppProfile, direction: Direction, start: int, count: int,
                   rng: np.random.Generator) -> np.ndarray:
    """Bytes handed to the MAC queue in subframes `start .. start + count - 1`.

    Draws `count` normals, then `count` uniforms from `rng`, whatever the shape,
    so streams stay aligned across profiles.
    """
    if start < 0:
        raise ConfigurationError(f"Negative subframe {start}", context="subframe")
    if count < 0:
        raise ConfigurationError(f"Negative subframe count {count}", context="subframe")
    params = profile.params(direction)
    noise = rng.normal(0.0, params.noise_std, size=count)
    burst_draws = rng.random(size=count)
    values = _envelope(profile.shape, params, np.arange(start, start + count)) + noise
    if profile.shape is Shape.BURSTY_DECAY:
        values += np.where(burst_draws < params.burst_probability, params.burst_bytes, 0.0)
    return np.maximum(np.floor(values + 0.5), 0.0).astype(np.int64)


def generate_arrivals(profile: AppProfile, direction: Direction, subframe: int,
                      rng: np.random.Generator) -> int:
    """Bytes the application hands to the MAC queue in one subframe.

    Consumes one normal draw and one uniform draw from `rng`.
    """
    return int(arrival_series(profile, direction, subframe, 1, rng)[0])


def _sinusoidal(label: str, qci: int, ul: tuple[float, float, int, float],
                dl: tuple[float, float, int, float]) -> AppProfile:
    return AppProfile(label, Shape.SINUSOIDAL, DirectionParams(*ul), DirectionParams(*dl), standard_qos(qci))


def _convex(label: str, ul: tuple[float, float, float], dl: tuple[float, float, float],
            span: int) -> AppProfile:
    return AppProfile(
        label, Shape.CONVEX,
        DirectionParams(ul[0], ul[1], span, ul[2]),
        DirectionParams(dl[0], dl[1], span, dl[2]),
        standard_qos(6))


def _call(label: str, qci: int, ul_rbs: int, dl_rbs: int, rb_bytes: int = 100) -> AppProfile:
    # Offered load sits below the persistent allocation; the grant is what leaks, not the load.
    def direction(rbs: int) -> DirectionParams:
        base = 0.8 * rbs * rb_bytes
        return DirectionParams(base_rate=base, noise_std=0.1 * base, persistent_rbs=rbs)
    return AppProfile(label, Shape.LINEAR, direction(ul_rbs), direction(dl_rbs), standard_qos(qci))


def _shopping(label: str, ul: tuple[float, float, int, float, float, float],
              dl: tuple[float, float, int, float, float, float]) -> AppProfile:
    def direction(p: tuple[float, float, int, float, float, float]) -> DirectionParams:
        return DirectionParams(base_rate=p[0], amplitude=p[1], period=p[2], noise_std=p[3],
                               burst_probability=p[4], burst_bytes=p[5])
    return AppProfile(label, Shape.BURSTY_DECAY, direction(ul), direction(dl), standard_qos(9))


DEFAULT_SESSION_SUBFRAMES = 4000


def _build_catalogue() -> dict[str, AppProfile]:
    span = DEFAULT_SESSION_SUBFRAMES
    profiles = [
        # shopping: (base, initial burst, half-life, noise, burst probability, burst bytes)
        _shopping("amazon", (500, 1500, 600, 120, 0.03, 1500), (1500, 7000, 800, 300, 0.03, 5000)),
        _shopping("ebay", (400, 1200, 500, 100, 0.025, 1200), (1200, 5500, 600, 250, 0.025, 4000)),
        _shopping("etsy", (330, 900, 450, 60, 0.02, 1000), (950, 4200, 500, 200, 0.02, 3200)),
        _shopping("target", (280, 800, 400, 140, 0.035, 900), (700, 3300, 400, 160, 0.02, 2500)),
        # calls: persistent RBs (UL, DL); the talking side uploads more
        _call("zoom_voice", 1, 20, 8),
        _call("facebook_voice", 1, 16, 8),
        _call("telegram_voice", 1, 12, 4),
        _call("whatsapp_voice", 1, 8, 4),
        _call("telegram_video", 2, 48, 32),
        _call("zoom_video", 2, 40, 28),
        _call("facebook_video", 2, 32, 20),
        _call("whatsapp_video", 2, 28, 16),
        _call("zoom_video_callee", 2, 24, 36),
        # YouTube: (base, amplitude, period, noise)
        _sinusoidal("youtube_live_sd", 7, (300, 100, 1000, 50), (1800, 900, 1000, 250)),
        _sinusoidal("youtube_live_hd", 7, (380, 140, 1000, 60), (3000, 1400, 1000, 350)),
        _sinusoidal("youtube_live_fhd", 7, (460, 180, 1000, 70), (4400, 2000, 1000, 450)),
        _sinusoidal("youtube_nonlive_sd", 6, (240, 120, 2500, 40), (2400, 2000, 2500, 300)),
        _sinusoidal("youtube_nonlive_hd", 6, (320, 160, 2500, 50), (3800, 3000, 2500, 400)),
        _sinusoidal("youtube_nonlive_fhd", 6, (400, 200, 2500, 60), (5400, 3800, 2500, 500)),
        # OTT: (base, amplitude, noise) over one session-long arc
        _convex("apple_tv", (350, 500, 60), (2500, 6000, 400), span),
        _convex("prime_video", (300, 350, 50), (2000, 4500, 350), span),
        _convex("netflix", (250, 450, 40), (1500, 5000, 300), span),
    ]
    return {profile.class_label: profile for profile in profiles}


PROFILE_CATALOGUE: dict[str, AppProfile] = _build_catalogue()


def catalogue_profile(label: str) -> AppProfile:
    if label not in PROFILE_CATALOGUE:
        raise ConfigurationError(
            f"Unknown application class '{label}'; known: {', '.join(sorted(PROFILE_CATALOGUE))}",
            context="profile")
    return PROFILE_CATALOGUE[label]
