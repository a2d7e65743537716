"""Parameter identification for the SIS system with one stratified block.

The observables are y = alpha*I and y1 = alpha*I1 for an unknown reporting
fraction alpha in (0, 1].  Two routes are implemented:

* equilibrium route: knowing mu and the equilibrium fractions I*, I1*
  (alpha cancels in their ratio), invert the endemic relations for
  (R0, theta, beta, gamma);

* trajectory route: from sampled (y, y1) on a window with genuine
  dynamics, recover first the two combinations beta/alpha and beta-gamma
  (identifiable from y alone; alpha, beta, gamma separately are not),
  then, using y1 as well, eliminate the unobserved w = beta*S1 and solve
  a beta-affine identity pointwise for beta, from which alpha and gamma
  follow.  States are reconstructed afterwards via I = y/alpha and
  S1 = w/beta.

The elimination behind the trajectory route, written with
G = d/dt ln y, L = (d^2/dt^2 ln y)/G (so that (beta/alpha)*y = -L):

    D    = dy/dt + y*L - mu*y
    mu + gamma = (dy1/dt*D - y*(d2y1/dt2 - beta*mu*y)) / (y*dy1/dt - y1*D)

from differentiating the y1 balance once, and independently

    mu + gamma = beta - G + L

from the y balance.  Equating the two and collecting beta gives
beta * C = Phi with

    C   = y*dy1/dt - y1*D - mu*y^2
    Phi = dy1/dt*D - y*d2y1/dt2 + (G - L)*(y*dy1/dt - y1*D).

When y1 tracks y exactly, C collapses to -y^2*L, which stays away from
zero on any window with curvature; the full derivation is spelled out in
docs/identification-derivation.md.

All rates here are per day and the time grid is in days.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateTrajectoryError,
    DomainError,
    InconsistentInputError,
    UnidentifiableWindowError,
)
from .model import SisState

_MIN_SAMPLES = 7
_EDGE = 2  # one-sided stencil width; estimates there are excluded from fits
_DY_FLOOR_SCALE = 1e-7  # of max|y| per day; below this the window counts as flat
_DY_FLOOR_REL = 1e-3
_DET_FLOOR_REL = 1e-8
_TRIM_FRACTION = 0.1


@dataclass(frozen=True)
class ObservedSeries:
    """Uniformly sampled observables; times in days.

    y1 may be omitted when only the reduced (y-only) identification is
    wanted.  alpha_true is never used by the estimators; it is a slot for
    carrying ground truth alongside synthetic data.
    """

    times: np.ndarray
    y: np.ndarray
    y1: np.ndarray | None = None
    alpha_true: float | None = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "y", y)
        if times.ndim != 1 or len(times) < 2:
            raise DomainError("need at least two samples")
        if y.shape != times.shape:
            raise DomainError(
                f"y shape {y.shape} does not match times shape {times.shape}"
            )
        steps = np.diff(times)
        if np.any(steps <= 0):
            raise DomainError("times must be strictly increasing")
        if np.max(np.abs(steps - steps[0])) > 1e-9 * steps[0]:
            raise DomainError("times must form a uniform grid")
        if not np.all(np.isfinite(y)):
            raise DomainError("y must be finite")
        if np.any(y < -1e-12) or np.any(y > 1.0 + 1e-9):
            raise DomainError("y must lie in [0, 1]")
        if self.y1 is not None:
            y1 = np.asarray(self.y1, dtype=float)
            object.__setattr__(self, "y1", y1)
            if y1.shape != times.shape:
                raise DomainError(
                    f"y1 shape {y1.shape} does not match times shape {times.shape}"
                )
            if not np.all(np.isfinite(y1)):
                raise DomainError("y1 must be finite")
            if np.any(y1 < -1e-12) or np.any(y1 > y + 1e-9):
                raise DomainError("need 0 <= y1 <= y")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def window(self, t0: float, t1: float) -> "ObservedSeries":
        """Restrict to samples with t0 <= t <= t1 (a small grid slack)."""
        eps = 1e-9 * max(1.0, abs(t1))
        keep = (self.times >= t0 - eps) & (self.times <= t1 + eps)
        if keep.sum() < 2:
            raise DomainError(f"window [{t0}, {t1}] keeps {int(keep.sum())} samples")
        return ObservedSeries(
            times=self.times[keep],
            y=self.y[keep],
            y1=None if self.y1 is None else self.y1[keep],
            alpha_true=self.alpha_true,
        )


@dataclass(frozen=True)
class SeriesDerivatives:
    first: np.ndarray
    second: np.ndarray
    log_first: np.ndarray
    log_second: np.ndarray


@dataclass(frozen=True)
class IdentificationResult:
    """Everything the trajectory route recovers.

    beta_over_alpha and beta_minus_gamma are identifiable from y alone;
    the remaining fields need y1.  residual is the median disagreement
    between the two independent expressions for mu+gamma and bounds how
    well the recovered rates explain the window.  w_series reconstructs
    w = beta*S1 on the full window.
    """

    beta_over_alpha: float
    beta_minus_gamma: float
    alpha: float
    beta: float
    gamma: float
    r0: float
    theta: float
    residual: float
    w_series: np.ndarray = field(repr=False)


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------


def _fd_weights(offsets, order: int) -> np.ndarray:
    # solve the Vandermonde moment conditions for a stencil reproducing
    # the requested derivative exactly on polynomials
    offsets = np.asarray(offsets, dtype=float)
    rhs = np.zeros(len(offsets))
    rhs[order] = math.factorial(order)
    return np.linalg.solve(np.vander(offsets, increasing=True).T, rhs)


_W1_CENTRAL = _fd_weights([-2, -1, 0, 1, 2], 1)  # 4th order
_W1_EDGE = [_fd_weights([0, 1, 2, 3, 4], 1), _fd_weights([-1, 0, 1, 2, 3], 1)]
_W2_CENTRAL = _fd_weights([-1, 0, 1], 2)  # 2nd order
_W2_EDGE = [_fd_weights([0, 1, 2, 3], 2)]


def _apply_stencils(v: np.ndarray, dt: float, central, edges, order: int):
    n = len(v)
    out = np.empty(n)
    half = len(central) // 2
    # interior as a sum of shifted slices
    acc = np.zeros(n - 2 * half)
    for k, w in enumerate(central):
        acc += w * v[k : n - 2 * half + k]
    out[half : n - half] = acc
    # one-sided ends; the right end reuses the left stencils mirrored,
    # which flips the sign for odd derivative orders
    rev = v[::-1]
    sign = -1.0 if order % 2 else 1.0
    for j, w in enumerate(edges):
        out[j] = w @ v[: len(w)]
        out[n - 1 - j] = sign * (w @ rev[: len(w)])
    return out / dt**order


def estimate_smooth_derivatives(values, dt: float) -> SeriesDerivatives:
    """Finite-difference derivatives of a uniformly sampled positive series.

    First derivatives use 4th-order stencils, second derivatives 2nd-order;
    endpoints fall back to one-sided stencils of the same order.  Returns
    the derivatives of the series and of its logarithm, so the series must
    be strictly positive throughout.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or len(v) < _MIN_SAMPLES:
        raise DomainError(f"need at least {_MIN_SAMPLES} samples, got {v.shape}")
    if not (dt > 0):
        raise DomainError(f"dt must be positive, got {dt}")
    if np.any(v <= 0):
        raise DomainError("series must be strictly positive (logs are taken)")
    lv = np.log(v)
    return SeriesDerivatives(
        first=_apply_stencils(v, dt, _W1_CENTRAL, _W1_EDGE, 1),
        second=_apply_stencils(v, dt, _W2_CENTRAL, _W2_EDGE, 2),
        log_first=_apply_stencils(lv, dt, _W1_CENTRAL, _W1_EDGE, 1),
        log_second=_apply_stencils(lv, dt, _W2_CENTRAL, _W2_EDGE, 2),
    )


# ---------------------------------------------------------------------------
# equilibrium route
# ---------------------------------------------------------------------------


def sis_endemic_state(beta: float, gamma: float, mu: float) -> SisState:
    """Forward map: the SIS endemic equilibrium for given per-day rates."""
    if mu <= 0 or beta <= 0 or gamma < 0:
        raise DomainError(
            f"need mu > 0, beta > 0, gamma >= 0, got ({beta}, {gamma}, {mu})"
        )
    r0 = beta / (mu + gamma)
    if r0 <= 1.0:
        raise DomainError(f"no endemic SIS equilibrium: R0 = {r0!r} <= 1")
    i_star = 1.0 - 1.0 / r0
    s1 = mu / (beta * i_star + mu)
    i1 = r0 * s1 * i_star
    return SisState(S=1.0 - i_star, I=i_star, S1=s1, I1=i1)


def identify_from_equilibrium(
    i_star: float, i1_star: float, mu: float
) -> tuple[float, float, float, float]:
    """Invert the SIS endemic relations: (i_star, i1_star, mu) -> (r0, theta, beta, gamma).

    theta = i1_star/i_star is the equilibrium fraction of infections that
    are first infections.  With r0 = 1/(1 - i_star) the rates follow as

        beta  = mu * (r0^2/theta - r0) / (r0 - 1)
        gamma = mu * (r0/theta - r0) / (r0 - 1),

    which satisfy r0 = beta/(mu + gamma) identically.
    """
    if not (0.0 < i_star < 1.0):
        raise DomainError(f"i_star must lie in (0, 1), got {i_star!r}")
    if not (0.0 < i1_star <= i_star):
        raise DomainError(
            f"i1_star must lie in (0, i_star], got i1_star={i1_star!r} i_star={i_star!r}"
        )
    if mu <= 0:
        raise DomainError(f"mu must be positive, got {mu!r}")
    r0 = 1.0 / (1.0 - i_star)
    theta = i1_star / i_star
    if r0 <= 1.0:
        raise InconsistentInputError(
            f"implied R0 = {r0!r} <= 1 cannot sustain i1_star = {i1_star!r} > 0"
        )
    beta = mu * (r0 * r0 / theta - r0) / (r0 - 1.0)
    gamma = mu * (r0 / theta - r0) / (r0 - 1.0)
    return r0, theta, beta, gamma


# ---------------------------------------------------------------------------
# trajectory route
# ---------------------------------------------------------------------------


def _interior(n: int) -> slice:
    return slice(_EDGE, n - _EDGE)


def _dynamic_mask(dy: np.ndarray, y_scale: float) -> np.ndarray:
    # keep samples where the trajectory genuinely moves, then restrict to
    # the majority sign of dy/dt: the log-based combinations are only
    # clean where the derivative keeps one sign.  Both floor terms scale
    # with the observations, so a rescaled series masks identically
    finite = np.isfinite(dy)
    if not finite.any():
        return finite
    floor = max(
        _DY_FLOOR_SCALE * y_scale,
        _DY_FLOOR_REL * float(np.max(np.abs(dy[finite]))),
    )
    mask = finite & (np.abs(dy) >= floor)
    if not mask.any():
        return mask
    majority = 1.0 if (np.sign(dy[mask]) > 0).sum() * 2 >= mask.sum() else -1.0
    return mask & (np.sign(dy) == majority)


def identify_from_y_only(s: ObservedSeries, mu: float) -> tuple[float, float]:
    """Recover (beta/alpha, beta-gamma) from the y series alone.

    Pointwise, beta/alpha = -(d^2/dt^2 ln y)/(dy/dt) and
    beta - gamma = mu + G - L; both are aggregated by median over interior
    samples where |dy/dt| clears a floor and keeps the majority sign.
    alpha, beta, gamma separately are not identifiable from y alone.
    """
    if mu < 0:
        raise DomainError(f"mu must be nonnegative, got {mu!r}")
    der = estimate_smooth_derivatives(s.y, s.dt)
    sl = _interior(len(s.y))
    dy = der.first[sl]
    G = der.log_first[sl]
    log2 = der.log_second[sl]

    mask = _dynamic_mask(dy, float(np.max(s.y)))
    if not mask.any():
        raise DegenerateTrajectoryError(
            "dy/dt stays below the floor across the window: the series is at "
            "equilibrium and the rate combinations are undetermined"
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        boa = -log2 / dy
        bmg = mu + G - log2 / G
    good = mask & np.isfinite(boa) & np.isfinite(bmg)
    if not good.any():
        raise DegenerateTrajectoryError("no usable samples for the y-only estimates")
    return float(np.median(boa[good])), float(np.median(bmg[good]))


def identify_full(s: ObservedSeries, mu: float) -> IdentificationResult:
    """Recover (alpha, beta, gamma) and companions from (y, y1).

    Solves the beta-affine identity beta*C = Phi pointwise (see the module
    docstring for C and Phi), discards the samples with the smallest and
    largest tenth of |C| and takes the median; alpha and gamma then follow
    from the y-only combinations.  The reported residual is the median
    disagreement of the two independent mu+gamma expressions at the
    recovered beta.
    """
    if s.y1 is None:
        raise DomainError("full identification needs the y1 series")
    if mu < 0:
        raise DomainError(f"mu must be nonnegative, got {mu!r}")
    if np.any(s.y <= 0) or np.any(s.y1 <= 0):
        raise DomainError("full identification needs strictly positive y and y1")

    dt = s.dt
    dy_full = estimate_smooth_derivatives(s.y, dt)
    dy1_full = estimate_smooth_derivatives(s.y1, dt)

    sl = _interior(len(s.y))
    y = s.y[sl]
    y1 = s.y1[sl]
    dy = dy_full.first[sl]
    G = dy_full.log_first[sl]
    log2 = dy_full.log_second[sl]
    dy1 = dy1_full.first[sl]
    ddy1 = dy1_full.second[sl]

    with np.errstate(divide="ignore", invalid="ignore"):
        L = log2 / G
        D = dy + y * L - mu * y
        det = y * dy1 - y1 * D
        C = det - mu * y * y
        phi = dy1 * D - y * ddy1 + (G - L) * det
        beta_pt = phi / C
        boa_pt = -log2 / dy
        bmg_pt = mu + G - L

    base = _dynamic_mask(dy, float(np.max(s.y))) & np.isfinite(det)
    if base.any():
        det_floor = _DET_FLOOR_REL * float(np.max(np.abs(det[base])))
        base &= np.abs(det) >= det_floor
    if not base.any():
        raise UnidentifiableWindowError(
            "the elimination determinant vanishes across the window (no usable "
            "dynamics); pick a window away from equilibrium"
        )

    usable = base & np.isfinite(C) & np.isfinite(beta_pt)
    if usable.any():
        c_floor = _DET_FLOOR_REL * float(np.max(np.abs(C[usable])))
        usable &= np.abs(C) >= c_floor
    if not usable.any():
        raise UnidentifiableWindowError(
            "the beta coefficient of the affine identity stays below threshold "
            "across the window"
        )

    idx = np.nonzero(usable)[0]
    order = idx[np.argsort(np.abs(C[idx]))]
    trim = min(int(_TRIM_FRACTION * len(order)), (len(order) - 1) // 2)
    kept = order[trim : len(order) - trim] if trim else order

    beta = float(np.median(beta_pt[kept]))
    if not (beta > 0 and math.isfinite(beta)):
        raise UnidentifiableWindowError(f"recovered beta = {beta!r} is not positive")

    good_y = base & np.isfinite(boa_pt) & np.isfinite(bmg_pt)
    if not good_y.any():
        raise UnidentifiableWindowError("no usable samples for the y-only combinations")
    beta_over_alpha = float(np.median(boa_pt[good_y]))
    beta_minus_gamma = float(np.median(bmg_pt[good_y]))
    if not (beta_over_alpha > 0 and math.isfinite(beta_over_alpha)):
        raise UnidentifiableWindowError(
            f"recovered beta/alpha = {beta_over_alpha!r} is not positive"
        )
    alpha = beta / beta_over_alpha
    gamma = beta - beta_minus_gamma

    with np.errstate(divide="ignore", invalid="ignore"):
        q300 = (dy1 * D - y * (ddy1 - beta * mu * y)) / det
        resid_pt = np.abs(q300 - (beta - G + L))
    residual = float(np.median(resid_pt[kept]))

    r0 = beta / (mu + gamma) if mu + gamma > 0 else math.inf
    theta = math.nan
    if math.isfinite(r0) and r0 > 1.0:
        i_pred = 1.0 - 1.0 / r0
        theta = r0 * mu / (beta * i_pred + mu)

    w_series = (s.y1 / s.y) * (dy1_full.log_first + mu + gamma)

    return IdentificationResult(
        beta_over_alpha=beta_over_alpha,
        beta_minus_gamma=beta_minus_gamma,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        r0=r0,
        theta=theta,
        residual=residual,
        w_series=w_series,
    )


def reconstruct_states(
    s: ObservedSeries, ident: IdentificationResult, mu: float
) -> list[SisState]:
    """Rebuild the full SIS state along the window from a successful fit.

    I = y/alpha, S = 1 - I, I1 = y1/alpha, S1 = w/beta with w the series
    stored on the identification result.
    """
    if s.y1 is None:
        raise DomainError("state reconstruction needs the y1 series")
    if np.any(s.y <= 0):
        raise DomainError("y vanishes on the window; states are not recoverable there")
    if len(ident.w_series) != len(s.times):
        raise DomainError(
            f"w_series length {len(ident.w_series)} does not match the window "
            f"({len(s.times)} samples)"
        )
    i_series = s.y / ident.alpha
    i1_series = s.y1 / ident.alpha
    s1_series = ident.w_series / ident.beta
    return [
        SisState(S=1.0 - i, I=i, S1=s1, I1=i1)
        for i, i1, s1 in zip(i_series, i1_series, s1_series)
    ]
