"""Computational kernels shared by the scenario runners and the acceptance checks.

Each function takes plain numbers so it can be shipped to a worker process.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ..physcore import IonSpecies, ground_state_extent
from ..potential import PotentialSpec, classical_turning_point, throw_catch_protocol
from ..qprop import (
    GridSpec,
    fock_distribution,
    harmonic_reference_fidelity,
    make_ground_state,
    make_squeezed_state,
    position_moments,
    propagate,
)


@dataclass(frozen=True)
class TransportGrid:
    """Grid for a transport over ``2 z0``: span ``z0 (1 + margin)`` on each side."""

    points: int
    margin: float
    dt: float

    def grid(self, z0: float, duration: float) -> GridSpec:
        half = z0 * (1.0 + self.margin)
        return GridSpec(-half, half, self.points, self.dt, max(1, math.ceil(duration / self.dt - 1e-9)))


@dataclass
class TransportOutcome:
    populations: np.ndarray  # Fock populations of the final well, n = 0..n_max
    catch_time: float  # s
    catch_position: float  # m
    norm_drift: float
    steps: int
    wall_time: float
    final_mean: float  # m
    final_variance: float  # m^2


def throw_catch_populations(
    species: IonSpecies,
    f_z: float,
    L4: float | None,
    z0: float,
    grid: TransportGrid,
    f_end: float | None = None,
    n_max: int = 6,
    catch_time: float | None = None,
    end_L3: float | None = None,
) -> TransportOutcome:
    """Instantaneous throw into a (possibly quartic) transport well and catch at the turning point.

    The catch time defaults to the classical turning time of the transport
    well for a particle released at rest at ``-z0``; the final well (same
    frequency as the initial one, ``f_end`` or ``f_z``) is centered where the
    particle turns.  Populations are those of the harmonic eigenstates of the
    final well.
    """
    t0 = time.perf_counter()
    transport = PotentialSpec(f_z, None, L4, 0.0)
    end = PotentialSpec(f_end or f_z, end_L3)
    if catch_time is None:
        catch_time, z_turn = classical_turning_point(transport, species, -z0)
    else:
        z_turn = z0
    proto = throw_catch_protocol(z0, transport, catch_time, end_well=end, final_center=z_turn)
    g = grid.grid(z0, proto.duration)
    psi = make_ground_state(g, proto.initial_well, species)
    res = propagate(psi, proto, species, g)
    pops = fock_distribution(res.final, proto.final_well, species, n_max)
    mz, vz = position_moments(res.final)
    return TransportOutcome(pops, catch_time, z_turn, res.norm_drift, res.steps_taken, time.perf_counter() - t0, mz, vz)


def anharmonic_lifetime(
    species: IonSpecies,
    f_z: float,
    L4: float,
    r: float,
    points: int = 4096,
    span_widths: float = 80.0,
    dt_periods: float = 0.2,
    t_max: float = 20e-3,
    threshold: float = 0.5,
):
    """Lifetime of a squeezed vacuum in a quartic well, relative to harmonic evolution.

    ``span_widths`` is the half-span in ground-state widths ``a0`` and
    ``dt_periods`` the step in units of ``1/omega``.
    """
    well = PotentialSpec(f_z)
    anh = PotentialSpec(f_z, None, L4)
    a0 = ground_state_extent(species, well.omega)
    g = GridSpec(-span_widths * a0, span_widths * a0, points, dt_periods / well.omega, 1)
    psi = make_squeezed_state(g, well, species, r)
    every = max(1, int(round(20.0 / dt_periods)))
    return harmonic_reference_fidelity(
        psi, well, anh, species, g, t_max=t_max, sample_every=every, threshold=threshold, stop_below=threshold - 0.02
    )
