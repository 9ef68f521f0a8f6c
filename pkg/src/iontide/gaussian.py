"""Gaussian-state dynamics of one motional mode: squeezing by sudden frequency
switches and loss of overlap under displacement noise.

Quadratures are normalized so that the vacuum covariance is ``diag(1/2, 1/2)``
(hbar = 1).  Position is measured in units of ``sqrt(2) a0`` of the reference
well ``omega1``, so a variance of 1/2 corresponds to ``a0^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DET_TOLERANCE = 1e-10
VACUUM_VARIANCE = 0.5


class CovarianceError(ArithmeticError):
    """Covariance matrix lost symmetry or positive definiteness."""


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray = field(default_factory=lambda: np.zeros(2))
    cov: np.ndarray = field(default_factory=lambda: np.eye(2) * VACUUM_VARIANCE)

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(2)
        cov = np.asarray(self.cov, dtype=float).reshape(2, 2)
        if not np.allclose(cov, cov.T, rtol=0, atol=1e-12 * max(1.0, np.abs(cov).max())):
            raise CovarianceError("covariance must be symmetric")
        cov = 0.5 * (cov + cov.T)
        if cov[0, 0] <= 0 or np.linalg.det(cov) <= 0:
            raise CovarianceError("covariance must be positive definite")
        if np.linalg.det(cov) < 0.25 * (1 - DET_TOLERANCE):
            raise CovarianceError(f"det cov = {np.linalg.det(cov):.6g} violates the uncertainty bound 1/4")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def vacuum(cls) -> "GaussianState":
        return cls()

    @classmethod
    def squeezed_vacuum(cls, r: float, phi: float = 0.0) -> "GaussianState":
        """Position variance ``e^{-2r}/2`` for ``phi = 0``; ``phi`` rotates the squeezed axis by ``phi/2``."""
        c, s = math.cos(phi / 2), math.sin(phi / 2)
        rot = np.array([[c, -s], [s, c]])
        return cls(cov=rot @ np.diag([0.5 * math.exp(-2 * r), 0.5 * math.exp(2 * r)]) @ rot.T)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.cov))

    @property
    def is_pure(self) -> bool:
        return abs(self.det - 0.25) < DET_TOLERANCE

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.cov)


def symplectic_rotation(lam: float, omega: float, t: float) -> np.ndarray:
    """Phase-space map for time ``t`` in a well of frequency ``lam * omega``.

    Quadratures are those of the ``omega`` well:
    ``[[cos(lam w t), lam sin(lam w t)], [-sin(lam w t)/lam, cos(lam w t)]]``.
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    ph = lam * omega * t
    c, s = math.cos(ph), math.sin(ph)
    return np.array([[c, lam * s], [-s / lam, c]])


def evolve_covariance(state: GaussianState, lam: float, omega: float, t: float) -> GaussianState:
    S = symplectic_rotation(lam, omega, t)
    cov = S @ state.cov @ S.T
    det0 = state.det
    # rounding in det grows with the square of the matrix entries
    if abs(np.linalg.det(cov) - det0) > 1e-12 * max(1.0, float(np.abs(cov).max())) ** 2:
        raise CovarianceError("symplectic evolution changed det cov")
    return GaussianState(S @ state.mean, cov)


@dataclass(frozen=True)
class SqueezeProtocol:
    """Repeated switch from ``omega1`` to ``omega2 = lam omega1`` and back.

    Each cycle holds the ``omega2`` well for a quarter of its period,
    ``pi/(2 lam omega1)`` (or ``hold`` if given).  Between cycles the state
    rotates freely in the ``omega1`` well for ``pi/(2 omega1)`` so the
    squeezed axis lines up with the next switch.
    """

    omega1: float
    omega2: float
    cycles: int = 1
    hold_override: float | None = None

    def __post_init__(self):
        if not (self.omega1 > 0 and self.omega2 > 0):
            raise ValueError("frequencies must be positive")
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")

    @classmethod
    def from_voltage_ratio(cls, omega1: float, voltage_ratio: float, cycles: int = 1) -> "SqueezeProtocol":
        """Switch the confining voltage by ``voltage_ratio``; frequency scales as its square root."""
        if not voltage_ratio > 0:
            raise ValueError("voltage ratio must be positive")
        return cls(omega1, omega1 * math.sqrt(voltage_ratio), cycles)

    @property
    def lam(self) -> float:
        return self.omega2 / self.omega1

    @property
    def hold(self) -> float:
        if self.hold_override is not None:
            return self.hold_override
        return math.pi / (2.0 * self.lam * self.omega1)

    @property
    def rotation(self) -> float:
        return math.pi / (2.0 * self.omega1)

    @property
    def cycle_period(self) -> float:
        return self.hold + self.rotation


@dataclass(frozen=True)
class SqueezingMetric:
    r: float
    db: float  # 10 log10 of the smallest variance relative to vacuum (negative when squeezed)
    min_variance: float
    max_variance: float

    @property
    def enhancement(self) -> float:
        """Vacuum variance over the smallest variance, ``1/lam^2`` after one switch cycle."""
        return VACUUM_VARIANCE / self.min_variance


def squeezing_metric(state: GaussianState) -> SqueezingMetric:
    lo, hi = state.eigenvalues()
    return SqueezingMetric(r=-0.5 * math.log(2 * lo), db=10 * math.log10(2 * lo), min_variance=lo, max_variance=hi)


def db_to_r(db: float) -> float:
    return -0.5 * math.log(10 ** (db / 10))


def r_to_db(r: float) -> float:
    return 10 * math.log10(math.exp(-2 * r))


@dataclass(frozen=True)
class CycleRecord:
    cycle: int
    min_variance: float
    db: float
    det: float

    COLUMNS = ("cycle", "min_variance", "db", "det_cov")
    UNITS = ("1", "vacuum/2", "dB", "1")


def run_squeeze_protocol(
    protocol: SqueezeProtocol, initial: GaussianState | None = None
) -> tuple[GaussianState, list[CycleRecord]]:
    """Apply ``protocol.cycles`` hold/switch-back cycles, rotating in ``omega1`` between them."""
    state = initial or GaussianState.vacuum()
    records = []
    for k in range(1, protocol.cycles + 1):
        if k > 1:
            state = evolve_covariance(state, 1.0, protocol.omega1, protocol.rotation)
        state = evolve_covariance(state, protocol.lam, protocol.omega1, protocol.hold)
        m = squeezing_metric(state)
        records.append(CycleRecord(k, m.min_variance, m.db, state.det))
    return state, records


def max_extent(state: GaussianState, a0: float) -> float:
    """Largest r.m.s. position extent over the state's free rotation, in the units of ``a0``."""
    return a0 * math.sqrt(2.0 * state.eigenvalues()[-1])


# ---------------------------------------------------------------------------
# heating


def squeezed_lifetime(rate: float, r: float) -> float:
    """Overlap decay time ``2/(rate cosh 2r)`` of a squeezed vacuum under displacement noise."""
    if not rate > 0:
        raise ValueError("heating rate must be positive")
    return 2.0 / (rate * math.cosh(2.0 * r))


def squeezed_lifetime_lambda(rate: float, lam_sq: float) -> float:
    """:func:`squeezed_lifetime` with ``e^{2r} = 1/lam_sq``."""
    if not lam_sq > 0:
        raise ValueError("lam_sq must be positive")
    return squeezed_lifetime(rate, -0.5 * math.log(lam_sq))


def squeezed_lifetime_approx(rate: float, r: float) -> float:
    """Large-``r`` form ``4/(rate e^{2r})``."""
    return 4.0 / (rate * math.exp(2.0 * r))


def displacement_noise_overlap(rate: float, r: float, t) -> np.ndarray | float:
    """Ensemble overlap ``exp(-t/tau)`` keeping only the phase-insensitive term."""
    tau = squeezed_lifetime(rate, r)
    out = np.exp(-np.asarray(t, dtype=float) / tau)
    return float(out) if out.ndim == 0 else out


def squeezed_displacement_overlap(beta, r: float, phi: float = 0.0, printed: bool = False):
    """``|<xi|D(beta)|xi>|^2`` for the squeezed vacuum ``|xi>``, ``xi = r e^{i phi}``.

    The exact value is ``exp(-|beta|^2 cosh 2r - Re(beta^2 e^{i phi}) sinh 2r)``.
    ``printed=True`` evaluates the variant with the ``cosh`` term halved
    instead, which is not bounded by 1.
    """
    beta = np.asarray(beta, dtype=complex)
    cross = np.real(beta * beta * np.exp(1j * phi)) * math.sinh(2 * r)
    mag = np.abs(beta) ** 2 * math.cosh(2 * r)
    if printed:
        return np.exp(-0.5 * mag - cross)
    return np.exp(-mag - cross)


def squeezed_noise_overlap_average(rate: float, r: float, t):
    """Ensemble average of the exact overlap for isotropic Gaussian kicks with ``<|beta|^2> = rate t``."""
    s = rate * np.asarray(t, dtype=float)
    return 1.0 / np.sqrt((1.0 + math.exp(2 * r) * s) * (1.0 + math.exp(-2 * r) * s))


@dataclass
class NoiseEnsemble:
    times: np.ndarray  # s
    overlap_mean: np.ndarray
    overlap_sem: np.ndarray
    kick_power: np.ndarray  # <|alpha_E|^2>
    kick_phase_moment: np.ndarray  # |<alpha_E^2>|
    realizations: int
    seed: int | None


def _increment_covariance(omega: float, t0: float, t1: float) -> np.ndarray:
    """Covariance of ``(int cos(w t) dW, int sin(w t) dW)`` over ``[t0, t1]`` for unit white noise."""
    dt = t1 - t0
    s2 = (math.sin(2 * omega * t1) - math.sin(2 * omega * t0)) / (4 * omega)
    c2 = (math.cos(2 * omega * t0) - math.cos(2 * omega * t1)) / (4 * omega)
    return np.array([[dt / 2 + s2, c2], [c2, dt / 2 - s2]])


def noise_ensemble(
    rate: float,
    r: float,
    omega: float,
    times,
    realizations: int = 10_000,
    seed: int | None = 0,
    phi: float = 0.0,
    substeps: int = 16,
    printed: bool = False,
) -> NoiseEnsemble:
    """Monte-Carlo average of the squeezed-state overlap under a white force field.

    Each realization accumulates ``alpha_E(t) = sqrt(rate) int_0^t e^{i omega t'} dW(t')``
    so that ``<|alpha_E|^2> = rate t``.  The stochastic integral is sampled
    exactly per sub-interval from its jointly Gaussian cosine and sine
    components, which is the continuum limit of a finely discretized
    stationary field.
    """
    times = np.sort(np.asarray(times, dtype=float))
    rng = np.random.default_rng(seed)
    edges = np.unique(
        np.concatenate([np.linspace(a, b, substeps + 1) for a, b in zip(np.r_[0.0, times[:-1]], times)])
    )
    alpha = np.zeros(realizations, dtype=complex)
    out_t, mean, sem, power, phase = [], [], [], [], []
    targets = set(times.tolist())
    for a, b in zip(edges[:-1], edges[1:]):
        cov = rate * _increment_covariance(omega, a, b)
        xy = rng.multivariate_normal(np.zeros(2), cov, size=realizations, method="eigh")
        alpha += xy[:, 0] + 1j * xy[:, 1]
        if b in targets:
            p = squeezed_displacement_overlap(alpha, r, phi, printed=printed)
            out_t.append(b)
            mean.append(p.mean())
            sem.append(p.std(ddof=1) / math.sqrt(realizations))
            power.append(np.mean(np.abs(alpha) ** 2))
            phase.append(abs(np.mean(alpha * alpha)))
    return NoiseEnsemble(
        np.array(out_t), np.array(mean), np.array(sem), np.array(power), np.array(phase), realizations, seed
    )
