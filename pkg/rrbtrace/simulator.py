"""Discrete-subframe simulation of one cell, producing the plaintext DCI log an eavesdropper sees."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .profiles import PROFILE_CATALOGUE, AppProfile, arrival_series, catalogue_profile
from .radio import CRNTI_MAX, CRNTI_MIN, DIRECTIONS, CellConfig, DciGrant, Direction, UeIdentity
from .scheduler import SimUe, schedule_subframe, validate_gbr_demand

logger = logging.getLogger(__name__)

# Entropy words separating the RNG streams derived from one seed
CRNTI_STREAM = 0x524E5449
JITTER_STREAM = 0x4A495454


@dataclass(frozen=True)
class UeSpec:
    profile: AppProfile
    crnti: int | None = None


@dataclass(frozen=True)
class SimConfig:
    cell: CellConfig
    ues: tuple[UeSpec, ...]
    duration_subframes: int
    seed: int

    def __post_init__(self) -> None:
        if self.duration_subframes < 1:
            raise ConfigurationError(
                f"Duration must be at least one subframe, got {self.duration_subframes}",
                context="duration_subframes")
        if not self.ues:
            raise ConfigurationError("A simulation needs at least one UE", context="ues")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError(f"Seed {self.seed} is not an unsigned 64-bit value", context="seed")


@dataclass(frozen=True)
class RarEvent:
    subframe: int
    rnti: UeIdentity


@dataclass(frozen=True)
class DciLog:
    rar_events: tuple[RarEvent, ...]
    grants: tuple[DciGrant, ...]
    duration_subframes: int | None = None


def _frozen(values: np.ndarray) -> np.ndarray:
    values.flags.writeable = False
    return values


@dataclass(frozen=True)
class UeTruth:
    crnti: UeIdentity
    class_label: str
    granted: dict[Direction, np.ndarray]
    arrivals: dict[Direction, np.ndarray]
    drained: dict[Direction, np.ndarray]
    final_buffer: dict[Direction, int]


@dataclass(frozen=True)
class GroundTruth:
    ues: dict[int, UeTruth] = field(default_factory=dict)

    def for_rnti(self, rnti: UeIdentity) -> UeTruth:
        return self.ues[rnti.crnti]


def _substream(seed: int, *words: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *words])))


def assign_crntis(config: SimConfig) -> list[UeIdentity]:
    """Configured C-RNTIs are kept; the rest are drawn without replacement from the C-RNTI range."""
    requested = [spec.crnti for spec in config.ues if spec.crnti is not None]
    if len(set(requested)) != len(requested):
        raise ConfigurationError("Duplicate C-RNTI in configuration", context="ues.crnti")
    taken = set(requested)
    rng = _substream(config.seed, CRNTI_STREAM)
    identities: list[UeIdentity] = []
    for spec in config.ues:
        crnti = spec.crnti
        while crnti is None or (spec.crnti is None and crnti in taken):
            crnti = int(rng.integers(CRNTI_MIN, CRNTI_MAX + 1))
        taken.add(crnti)
        identities.append(UeIdentity(crnti))
    return identities


def run_simulation(config: SimConfig) -> tuple[DciLog, GroundTruth]:
    """Run every subframe: arrivals, queueing, scheduling, logging."""
    cell = config.cell
    duration = config.duration_subframes
    identities = assign_crntis(config)
    ues = [SimUe.attach(identity, spec.profile) for identity, spec in zip(identities, config.ues)]
    validate_gbr_demand(cell, ues)
    logger.info("Simulating %d UE(s) for %d subframes (seed %d)", len(ues), duration, config.seed)

    streams = {
        (index, direction): _substream(config.seed, index, direction.dci_format)
        for index in range(len(ues)) for direction in DIRECTIONS
    }
    # Arrivals never depend on queue state, so each series is drawn up front.
    arrivals = np.stack([
        np.stack([arrival_series(ue.profile, direction, 0, duration, streams[(index, direction)])
                  for direction in DIRECTIONS])
        for index, ue in enumerate(ues)
    ])
    position = {ue.identity.crnti: index for index, ue in enumerate(ues)}
    slot = {direction: d for d, direction in enumerate(DIRECTIONS)}
    queues = [[ue.queues[direction] for direction in DIRECTIONS] for ue in ues]
    pending = arrivals.tolist()
    granted = np.zeros(arrivals.shape, dtype=np.int64)
    drained = np.zeros(arrivals.shape, dtype=np.int64)

    rar_events = tuple(RarEvent(0, identity) for identity in identities)
    grants: list[DciGrant] = []

    for subframe in range(duration):
        before: list[int] = []
        for index, ue_queues in enumerate(queues):
            for d, queue in enumerate(ue_queues):
                queue.enqueue(pending[index][d][subframe])
                before.append(queue.buffered_bytes)

        issued = schedule_subframe(cell, ues, subframe)
        # Queues only drain through grants.
        for grant in issued:
            index, d = position[grant.rnti.crnti], slot[grant.direction]
            granted[index, d, subframe] += grant.tbs_bytes
            drained[index, d, subframe] = before[index * len(DIRECTIONS) + d] - queues[index][d].buffered_bytes
        grants.extend(issued)

    truth = GroundTruth({
        ue.identity.crnti: UeTruth(
            crnti=ue.identity,
            class_label=ue.profile.class_label,
            granted={direction: _frozen(granted[index, d].copy()) for d, direction in enumerate(DIRECTIONS)},
            arrivals={direction: _frozen(arrivals[index, d].copy()) for d, direction in enumerate(DIRECTIONS)},
            drained={direction: _frozen(drained[index, d].copy()) for d, direction in enumerate(DIRECTIONS)},
            final_buffer={direction: ue.queues[direction].buffered_bytes for direction in DIRECTIONS},
        )
        for index, ue in enumerate(ues)
    })
    logger.info("Simulation finished: %d grants", len(grants))
    return DciLog(rar_events, tuple(grants), duration), truth


def trace_seed(seed: int, label: str, iteration: int) -> int:
    """Seed for one synthetic trace, derived from the top-level seed."""
    catalogue_profile(label)
    label_index = sorted(PROFILE_CATALOGUE).index(label)
    state = np.random.SeedSequence([seed, label_index, iteration]).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 32 | int(state[1])


def synthetic_sim_config(label: str, iteration: int, seed: int,
                         duration: int, cell: CellConfig | None = None,
                         jitter: float = 0.05) -> SimConfig:
    """One-victim cell running a catalogue profile, with per-iteration load jitter."""
    profile = catalogue_profile(label)
    run_seed = trace_seed(seed, label, iteration)
    factor = 1.0 + float(_substream(run_seed, JITTER_STREAM).uniform(-jitter, jitter))
    return SimConfig(
        cell=cell or CellConfig(),
        ues=(UeSpec(profile.scaled(factor)),),
        duration_subframes=duration,
        seed=run_seed,
    )
