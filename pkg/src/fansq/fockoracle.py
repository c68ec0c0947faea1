"""Brute-force oracle on truncated Fock space.

States are dense amplitude vectors indexed by occupation number; ladder
operators act as banded (single off-diagonal) linear maps, never as
dense matrix powers.  Everything here is deliberately independent of
the closed-form series in `fanstate`/`squeeze`: the two routes must
agree, and this module is the referee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, TruncationTooSmall
from .fanstate import (
    DEFAULT_CONTROL,
    FanConfig,
    Identity,
    SeriesControl,
    fock_coefficients,
    nonlinearity_value,
    normalization,
)
from .specfun import log_factorial

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class FockVector:
    """Truncated Fock-space state: amplitudes plus reported tail mass."""

    dim: int
    amps: np.ndarray
    tail_mass: float

    def __post_init__(self) -> None:
        if self.dim != self.amps.size:
            raise DomainError(f"dim={self.dim} but amps has size {self.amps.size}")

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)


def vacuum(dim: int) -> FockVector:
    amps = np.zeros(dim, dtype=np.complex128)
    amps[0] = 1.0
    return FockVector(dim=dim, amps=amps, tail_mass=0.0)


def support_level(v: FockVector, cutoff: float = 1e-14) -> int:
    """Highest occupation number with amplitude magnitude above cutoff."""
    idx = np.nonzero(np.abs(v.amps) > cutoff)[0]
    return int(idx[-1]) if idx.size else 0


def apply_annihilation(v: FockVector) -> tuple[np.ndarray, float]:
    """Lowering map: out[n] = sqrt(n+1) amps[n+1]; returns (vector, leakage).

    Lowering cannot push amplitude past the truncation edge, so the
    leakage estimate is zero; it is reported for symmetry with raising.
    """
    if v.dim < 2:
        raise DomainError("need dim >= 2 to apply a ladder map")
    out = np.zeros_like(v.amps)
    n = np.arange(1, v.dim)
    out[:-1] = np.sqrt(n) * v.amps[1:]
    return out, 0.0


def apply_creation(v: FockVector) -> tuple[np.ndarray, float]:
    """Raising map: out[n] = sqrt(n) amps[n-1]; top amplitude leaks out."""
    if v.dim < 2:
        raise DomainError("need dim >= 2 to apply a ladder map")
    out = np.zeros_like(v.amps)
    n = np.arange(1, v.dim)
    out[1:] = np.sqrt(n) * v.amps[:-1]
    leakage = v.dim * abs(v.amps[-1]) ** 2
    return out, leakage


def _quadrature_apply(amps: np.ndarray, phi: float) -> np.ndarray:
    """One application of (a e^{-i phi} + a-dagger e^{i phi}) / sqrt(2)."""
    out = np.zeros_like(amps)
    n = np.arange(1, amps.size)
    root = np.sqrt(n)
    out[:-1] += (np.exp(-1j * phi) / _SQRT2) * root * amps[1:]
    out[1:] += (np.exp(1j * phi) / _SQRT2) * root * amps[:-1]
    return out


def quadrature_moment(v: FockVector, phi: float, N: int) -> float:
    """Central moment of the rotated quadrature: <(X_phi - <X_phi>)^N>.

    Computed by N successive applications of (X_phi - mu) to the state,
    not by binomial expansion of raw moments, so large-N cancellation
    never happens.  Requires enough guard rows that the repeated maps
    stay clear of the truncation edge.
    """
    if N < 2 or N % 2 != 0:
        raise DomainError(f"moment order must be even and >= 2, got {N}")
    if v.dim < support_level(v) + N:
        raise TruncationTooSmall(
            f"dim={v.dim} leaves fewer than N={N} guard rows above "
            f"support level {support_level(v)}"
        )
    amps = v.amps
    mu = np.vdot(amps, _quadrature_apply(amps, phi)).real
    w = amps.copy()
    for _ in range(N):
        w = _quadrature_apply(w, phi) - mu * w
    val = np.vdot(amps, w)
    if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
        raise ArithmeticError(f"central moment has imaginary residue {val.imag:.3e}")
    return float(val.real)


def moment_oracle(v: FockVector, l: int, m: int) -> complex:
    """Normally-ordered moment from raw amplitudes: <(a-dagger)^l a^m>.

    Direct sum over occupation numbers with exact half-log factorial
    weights; serves as the independent check of the series route.
    """
    if l < 0 or m < 0:
        raise DomainError(f"powers must be nonnegative, got l={l}, m={m}")
    if v.dim < support_level(v) + l + m:
        raise TruncationTooSmall(
            f"dim={v.dim} too small for powers l={l}, m={m} at "
            f"support level {support_level(v)}"
        )
    amps = v.amps
    d = l - m
    lo = m
    hi = v.dim - 1 - max(d, 0)
    if hi < lo:
        return 0.0 + 0.0j
    ns = np.arange(lo, hi + 1)
    lf = np.array([log_factorial(int(i)) for i in range(v.dim + max(d, 0) + 1)])
    weight = np.exp(0.5 * ((lf[ns] - lf[ns - m]) + (lf[ns - m + l] - lf[ns - m])))
    # explicit real/imag kernel instead of complex multiply: elementwise
    # float products commute and subtraction negates exactly, so swapping
    # l and m conjugates the result bit for bit (hardware FMA breaks this
    # for the fused complex product)
    xa, ya = amps.real[ns + d], amps.imag[ns + d]
    xb, yb = amps.real[ns], amps.imag[ns]
    re = np.sum((xa * xb + ya * yb) * weight)
    im = np.sum((xa * yb - ya * xb) * weight)
    return complex(re, im)


def oracle_vector(
    cfg: FanConfig,
    guard: int,
    ctl: SeriesControl = DEFAULT_CONTROL,
    tail_target: float = 1e-30,
) -> FockVector:
    """Fan-state Fock vector sized for oracle use.

    Chooses the smallest support depth whose analytic tail mass is below
    tail_target, then adds `guard` extra rows so repeated ladder maps
    never touch the truncation edge.
    """
    if guard < 0:
        raise DomainError(f"guard must be >= 0, got {guard}")
    k = cfg.k
    d = normalization(cfg, ctl)
    # walk the support weights until they fall below the target
    from .fanstate import nonlinearity_product
    from .specfun import signed_log

    xi_sl = signed_log(cfg.xi)
    n = 0
    last = 0
    while True:
        t = xi_sl.pow_int(8 * k * n)
        if t.sign == 0 and n > 0:
            last = n - 1
            break
        prod = nonlinearity_product(cfg.model, 4 * k * n, 2 * k, ctl.laguerre_floor)
        logw = (
            math.log(4 * k * k) + t.logmag - log_factorial(4 * k * n) - 2 * prod.logmag
        ) - math.log(d)
        if n > 0 and logw < math.log(tail_target) - math.log(100.0):
            last = n
            break
        n += 1
        if n > ctl.n_max:
            raise TruncationTooSmall(
                f"support weights not below {tail_target} within {ctl.n_max} levels"
            )
    dim = 4 * k * last + guard + 1
    return fock_coefficients(cfg, dim, ctl)


def eigen_residual(cfg: FanConfig, v: FockVector) -> float:
    """Relative residual of the 4k-quantum eigenvalue relation.

    With G = a^{2k} f(number operator), the fan state satisfies
    G^2 v = xi^{4k} v: each component eigenvalue is a 4k-th root times
    xi, and squaring the 2k-quantum relation makes them all agree.
    Below the quantum order, f is taken as one (those entries are
    annihilated by a^{2k} anyway).
    """
    k = cfg.k
    step = 2 * k
    if v.dim < step + 1:
        raise TruncationTooSmall(f"dim={v.dim} cannot hold a {step}-quantum map")
    fvals = np.ones(v.dim)
    if not isinstance(cfg.model, Identity):
        for i in range(step, v.dim):
            fvals[i] = nonlinearity_value(cfg.model, i).to_real()

    def apply_g(w: np.ndarray) -> np.ndarray:
        out = fvals * w
        for _ in range(step):
            shifted = np.zeros_like(out)
            n = np.arange(1, out.size)
            shifted[:-1] = np.sqrt(n) * out[1:]
            out = shifted
        return out

    gg = apply_g(apply_g(v.amps))
    target = (cfg.xi ** (4 * k)) * v.amps
    num = float(np.linalg.norm(gg - target))
    den = float(np.linalg.norm(v.amps))
    return num / den


def support_check(v: FockVector, k: int) -> bool:
    """True iff amplitudes away from multiples of 4k are below 1e-12."""
    if k < 1:
        raise DomainError(f"fan order must be >= 1, got {k}")
    mask = np.ones(v.dim, dtype=bool)
    mask[:: 4 * k] = False
    return bool(np.all(np.abs(v.amps[mask]) < 1e-12))
