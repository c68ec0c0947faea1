"""Fan states: nonlinearity models, normalization, and moment series.

A fan state of order k is an equal-weight superposition of 2k nonlinear
coherent states whose eigenvalues share one magnitude xi and fan out at
angles pi*q/2k in the complex plane.  The superposition cancels every
Fock level except multiples of 4k, and every normally-ordered moment
reduces to a single sum over Fock levels weighted by factorials and
running products of the nonlinearity.  Those sums are evaluated here in
sign/log arithmetic with compensated accumulation, so factorial growth
never touches floating-point range limits.

Conventions fixed by this module:
  * xi is real and nonnegative; the eigenvalue phases are folded into
    the even/odd interference factor analytically and never stored.
  * the running nonlinearity product steps by 2k (the component states
    are 2k-quantum), terminating with its last factor at index 2k.
  * series stop after `consecutive_small` successive terms fall below
    rel_tol times the accumulated sum, which rides out the exact zeros
    the interference factor inserts at odd summation indices.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union

from .errors import DomainError, SeriesNotConverged, SingularNonlinearity
from .specfun import (
    SL_ONE,
    SL_ZERO,
    CompensatedSum,
    LaguerreTable,
    SignedLog,
    interference_factor,
    log_factorial,
    signed_log,
)

_LOG_HUGE = 700.0  # ln of near-overflow; a term this large means divergence


@dataclass(frozen=True)
class Identity:
    """Nonlinearity equal to one: ordinary multi-quantum coherent states."""


@dataclass(frozen=True)
class TrappedIon:
    """Laguerre-ratio nonlinearity of a laser-driven trapped ion.

    eta_sq is the squared Lamb-Dicke parameter; quantum_order is the
    sideband order K.  The value at Fock argument m is

        (m-K)! L_{m-K}^{K}(eta_sq) / ( m! L_{m-K}^{0}(eta_sq) )

    defined for m >= K.  Zeros of the denominator polynomial make the
    state ill-defined; evaluation aborts there rather than skipping.
    """

    eta_sq: float
    quantum_order: int

    def __post_init__(self) -> None:
        if not (isinstance(self.quantum_order, int) and self.quantum_order >= 1):
            raise DomainError(f"quantum_order must be a positive integer, got {self.quantum_order}")
        if not (math.isfinite(self.eta_sq) and self.eta_sq > 0):
            raise DomainError(f"eta_sq must be finite and > 0, got {self.eta_sq}")


NonlinearModel = Union[Identity, TrappedIon]


@dataclass(frozen=True)
class FanConfig:
    """Everything that pins down one fan state: order k, eigenvalue magnitude, model."""

    k: int
    xi: float
    model: NonlinearModel

    def __post_init__(self) -> None:
        if not (isinstance(self.k, int) and self.k >= 1):
            raise DomainError(f"fan order k must be a positive integer, got {self.k}")
        if not (math.isfinite(self.xi) and self.xi >= 0):
            raise DomainError(f"xi must be finite and >= 0, got {self.xi}")
        if isinstance(self.model, TrappedIon) and self.model.quantum_order != 2 * self.k:
            raise DomainError(
                f"trapped-ion quantum_order must equal 2k = {2 * self.k}, "
                f"got {self.model.quantum_order}"
            )

    @property
    def xi_sq(self) -> float:
        return self.xi * self.xi

    @classmethod
    def from_xi_sq(cls, k: int, xi_sq: float, model: NonlinearModel) -> "FanConfig":
        if not (math.isfinite(xi_sq) and xi_sq >= 0):
            raise DomainError(f"xi_sq must be finite and >= 0, got {xi_sq}")
        return cls(k, math.sqrt(xi_sq), model)


@dataclass(frozen=True)
class DriveParams:
    """Carrier/sideband drive of the trapped ion.

    omega0: carrier Rabi frequency; omega1: sideband Rabi frequency;
    eta: Lamb-Dicke parameter; phase: laser phase difference, reduced
    to [0, 2 pi); quantum_order: sideband order K.
    """

    omega0: float
    omega1: float
    eta: float
    phase: float
    quantum_order: int

    def __post_init__(self) -> None:
        for name in ("omega0", "omega1", "eta"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and > 0, got {v}")
        if not (isinstance(self.quantum_order, int) and self.quantum_order >= 1):
            raise DomainError(f"quantum_order must be a positive integer, got {self.quantum_order}")
        object.__setattr__(self, "phase", self.phase % (2 * math.pi))


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the infinite Fock-level sums."""

    rel_tol: float = 1e-16
    consecutive_small: int = 3
    n_max: int = 5000
    laguerre_floor: float = 1e-12

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be > 0, got {self.rel_tol}")
        if self.n_max < 1:
            raise DomainError(f"n_max must be >= 1, got {self.n_max}")
        if self.consecutive_small < 1:
            raise DomainError(f"consecutive_small must be >= 1, got {self.consecutive_small}")


DEFAULT_CONTROL = SeriesControl()


# ---------------------------------------------------------------------------
# nonlinearity evaluation and running products

_laguerre_tables: dict[tuple[float, int], LaguerreTable] = {}
_tables_lock = threading.Lock()


def _laguerre_table(eta_sq: float, alpha: int) -> LaguerreTable:
    key = (eta_sq, alpha)
    tab = _laguerre_tables.get(key)
    if tab is None:
        with _tables_lock:
            tab = _laguerre_tables.setdefault(key, LaguerreTable(alpha, eta_sq))
    return tab


def nonlinearity_value(model: NonlinearModel, m: int, floor: float = 1e-12) -> SignedLog:
    """f(m) as a SignedLog; may be negative for the trapped-ion model."""
    if isinstance(model, Identity):
        return SL_ONE
    K = model.quantum_order
    if m < K:
        raise DomainError(f"nonlinearity argument {m} below quantum order {K}")
    j = m - K
    den = _laguerre_table(model.eta_sq, 0).value(j)
    if abs(den) < floor:
        raise SingularNonlinearity(
            f"denominator Laguerre polynomial of degree {j} vanishes at "
            f"eta_sq={model.eta_sq} (|value|={abs(den):.3e} below floor {floor})",
            index=m,
        )
    num = _laguerre_table(model.eta_sq, K).value(j)
    if num == 0.0:
        return SL_ZERO
    sign = (1 if num > 0 else -1) * (1 if den > 0 else -1)
    logmag = (
        log_factorial(j) - log_factorial(m) + math.log(abs(num)) - math.log(abs(den))
    )
    return SignedLog(sign, logmag)


_product_cache: dict[tuple[NonlinearModel, int, float], list[SignedLog]] = {}
_product_lock = threading.Lock()


def _product_list(model: NonlinearModel, step: int, floor: float, j: int) -> list[SignedLog]:
    """Products of f at multiples of `step`, filled up to index j.

    Entry i holds f(step)*f(2*step)*...*f(i*step); entry 0 is one.
    """
    key = (model, step, floor)
    lst = _product_cache.get(key)
    if lst is not None and j < len(lst):
        return lst
    with _product_lock:
        lst = _product_cache.setdefault(key, [SL_ONE])
        if j < len(lst):
            return lst
        grown = list(lst)
        while len(grown) <= j:
            i = len(grown)
            factor = nonlinearity_value(model, i * step, floor)
            if factor.sign == 0:
                raise SingularNonlinearity(
                    f"nonlinearity vanishes exactly at Fock argument {i * step}; "
                    "downstream amplitude ratios are undefined",
                    index=i * step,
                )
            grown.append(grown[-1].mul(factor))
        _product_cache[key] = grown
        return grown


def nonlinearity_product(
    model: NonlinearModel, p: int, step: int, floor: float = 1e-12
) -> SignedLog:
    """Running product f(p) f(p-step) ... with last factor at index >= step.

    Exactly one for 0 <= p < step.  Memoized per (model, step) at the
    multiples of step, which is the only case the fan-state series hit.
    """
    if step < 1:
        raise DomainError(f"step must be >= 1, got {step}")
    if p < 0:
        raise DomainError(f"product index must be >= 0, got {p}")
    if p < step:
        return SL_ONE
    q, r = divmod(p, step)
    if r == 0:
        return _product_list(model, step, floor, q)[q]
    # off-lattice chain: f(p) f(p-step) ... f(step + r); not cached
    out = SL_ONE
    idx = p
    while idx >= step:
        factor = nonlinearity_value(model, idx, floor)
        if factor.sign == 0:
            raise SingularNonlinearity(
                f"nonlinearity vanishes exactly at Fock argument {idx}", index=idx
            )
        out = out.mul(factor)
        idx -= step
    return out


def product_convention_diagnostic(
    model: NonlinearModel, k: int, n: int, floor: float = 1e-12
) -> dict:
    """Compare the two readings of the generalized factorial at level 4kn.

    The composition of the fan state out of 2k-quantum components gives a
    step-2k product at each support level; a step-4k reading also appears
    in print.  Both are returned so the difference is visible instead of
    silently chosen.  They coincide for the identity model.
    """
    level = 4 * k * n
    narrow = nonlinearity_product(model, level, 2 * k, floor)
    wide = nonlinearity_product(model, level, 4 * k, floor)
    gap = None
    if narrow.sign != 0 and wide.sign != 0:
        gap = (narrow.sign * wide.sign, narrow.logmag - wide.logmag)
    return {
        "level": level,
        "step_2k": narrow,
        "step_4k": wide,
        "ratio_sign_and_log": gap,
    }


# ---------------------------------------------------------------------------
# series engine

def _sum_series(terms: Iterator[float], ctl: SeriesControl, what: str) -> float:
    """Neumaier-compensated sum with the consecutive-small-tail stop rule."""
    acc = CompensatedSum()
    small = 0
    count = 0
    for t in terms:
        count += 1
        acc.add(t)
        if abs(t) <= ctl.rel_tol * abs(acc.value):
            small += 1
            if small >= ctl.consecutive_small:
                return acc.value
        else:
            small = 0
        if count >= ctl.n_max:
            raise SeriesNotConverged(
                f"{what}: tail criterion not met after {ctl.n_max} terms"
            )
    return acc.value


@lru_cache(maxsize=None)
def normalization(cfg: FanConfig, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Squared norm of the unnormalized fan superposition; always > 0.

    Sum over Fock support: the interference factor squared keeps only
    even summation indices, each weighted by xi^(4km) / ((2km)! times
    the squared running product).
    """
    k = cfg.k
    step = 2 * k
    xi_sl = signed_log(cfg.xi)
    floor = ctl.laguerre_floor

    def terms() -> Iterator[float]:
        # leading term is exactly (2k)^2: emitting it outside the
        # log/exp roundtrip keeps the xi -> 0 limit exact
        yield float(4 * k * k)
        m = 1
        while True:
            jf = interference_factor(k, m)
            if jf == 0:
                yield 0.0
            else:
                prod = nonlinearity_product(cfg.model, step * m, step, floor)
                t = xi_sl.pow_int(4 * k * m)
                logmag = (
                    t.logmag
                    + 2 * math.log(jf)
                    - log_factorial(step * m)
                    - 2 * prod.logmag
                )
                if t.sign == 0:
                    yield 0.0
                elif logmag > _LOG_HUGE:
                    raise SeriesNotConverged(
                        f"normalization term at index {m} exceeds float range"
                    )
                else:
                    yield math.exp(logmag)
            m += 1

    return _sum_series(terms(), ctl, f"normalization k={k} xi={cfg.xi}")


@lru_cache(maxsize=None)
def _moment_cached(cfg: FanConfig, l: int, m: int, ctl: SeriesControl) -> float:
    k = cfg.k
    step = 2 * k
    diff = l - m
    if diff % step != 0:
        return 0.0
    if (diff // step) % 2 != 0:
        return 0.0
    if cfg.xi == 0.0:
        return 1.0 if l == 0 and m == 0 else 0.0

    log_xi = math.log(cfg.xi)
    floor = ctl.laguerre_floor
    n_min = -(-m // step)  # ceil(m / 2k)
    model = cfg.model

    def terms() -> Iterator[float]:
        n = n_min
        while True:
            jf = interference_factor(k, n)
            # offset diff/2k is even, so n and n + diff/2k share parity
            if jf == 0:
                yield 0.0
            else:
                p1 = nonlinearity_product(model, step * n, step, floor)
                p2 = nonlinearity_product(model, step * n + diff, step, floor)
                logmag = (
                    2 * math.log(jf)
                    + (4 * k * n) * log_xi
                    - log_factorial(step * n - m)
                    - p1.logmag
                    - p2.logmag
                )
                if logmag > _LOG_HUGE:
                    raise SeriesNotConverged(
                        f"moment ({l},{m}) term at index {n} exceeds float range"
                    )
                yield p1.sign * p2.sign * math.exp(logmag)
            n += 1

    total = _sum_series(terms(), ctl, f"moment l={l} m={m} k={k} xi={cfg.xi}")
    d = normalization(cfg, ctl)
    return (cfg.xi**diff) * total / d


def moment(cfg: FanConfig, l: int, m: int, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Normally-ordered moment: expectation of (a-dagger)^l a^m, real xi.

    Zero unless the level offset l - m is an even multiple of 2k (the
    interference factor kills everything else).  For l < m the value
    equals the swapped moment because xi is real.
    """
    if l < 0 or m < 0:
        raise DomainError(f"moment powers must be nonnegative, got l={l}, m={m}")
    if l < m:
        l, m = m, l
    return _moment_cached(cfg, l, m, ctl)


def fock_coefficients(cfg: FanConfig, dim: int, ctl: SeriesControl = DEFAULT_CONTROL):
    """Truncated Fock expansion of the normalized fan state.

    Amplitudes sit only at levels 4kn:
        c_{4kn} = 2k * D^{-1/2} * xi^{4kn} / ( sqrt((4kn)!) * product(4kn) )
    with the step-2k running product.  Real and possibly negative (the
    product carries a sign for the trapped-ion model).  Raises
    TruncationTooSmall when the requested dim leaves tail mass >= 1e-14.
    """
    from .fockoracle import FockVector  # deferred: fockoracle builds on this module
    import numpy as np
    from .errors import TruncationTooSmall

    if dim < 1:
        raise DomainError(f"dim must be >= 1, got {dim}")
    k = cfg.k
    step = 2 * k
    d = normalization(cfg, ctl)
    log_d_half = 0.5 * math.log(d)
    xi_sl = signed_log(cfg.xi)
    amps = np.zeros(dim, dtype=np.complex128)
    captured = CompensatedSum()
    n = 0
    while 4 * k * n < dim:
        level = 4 * k * n
        prod = nonlinearity_product(cfg.model, level, step, ctl.laguerre_floor)
        t = xi_sl.pow_int(level)
        if t.sign != 0:
            logmag = (
                math.log(2 * k)
                - log_d_half
                + t.logmag
                - 0.5 * log_factorial(level)
                - prod.logmag
            )
            c = prod.sign * math.exp(logmag)
            amps[level] = c
            captured.add(c * c)
        elif level == 0:
            # xi == 0: the state is vacuum
            amps[0] = 2 * k / math.exp(log_d_half)
            captured.add(abs(amps[0]) ** 2)
        n += 1
    tail = 1.0 - captured.value
    if tail >= 1e-14:
        raise TruncationTooSmall(
            f"dim={dim} leaves tail mass {tail:.3e} >= 1e-14 for k={k}, xi={cfg.xi}"
        )
    return FockVector(dim=dim, amps=amps, tail_mass=max(tail, 0.0))


def xi_from_drive(d: DriveParams) -> float:
    """Eigenvalue magnitude set by the drive: (omega0 / (eta^K omega1))^(1/K).

    The drive fixes xi^K up to a phase; the phase is discarded because
    this package works in the convention that xi is real and the
    quadrature angle is measured from the xi direction.
    """
    K = d.quantum_order
    ratio = d.omega0 / (d.eta**K * d.omega1)
    if not (math.isfinite(ratio) and ratio > 0):
        raise DomainError(f"drive ratio must be finite and > 0, got {ratio}")
    return ratio ** (1.0 / K)
