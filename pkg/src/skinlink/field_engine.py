"""Discretized Fresnel-zone radiation integral and its independent oracle.

Evaluates the scattered field of piecewise-constant electric/magnetic surface
currents on the panel lattice, the received power, the Fresnel validity bound,
field-cut maps around the receiver, and a sub-patch quadrature oracle used to
cross-check the closed-form cell sum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .aperture import ApertureGrid
from .constants import ETA0
from .errors import (ConfigError, DomainError, FresnelValidityError,
                     FresnelValidityWarning, GeometryError)

_COMPENSATED_THRESHOLD = 100_000   # cells; above this use block-compensated sums
_POINT_CHUNK = 256                 # observation points per vectorized chunk


@dataclass(frozen=True)
class SurfaceCurrents:
    """Per-cell complex current coefficients on an aperture grid.

    je_* are electric [A/m] and jm_* magnetic [V/m] surface-current expansion
    coefficients, all shaped (P, Q) and indexed [p, q].
    """

    je_x: np.ndarray
    je_y: np.ndarray
    jm_x: np.ndarray
    jm_y: np.ndarray
    grid: ApertureGrid

    def __post_init__(self):
        shape = (self.grid.p_count, self.grid.q_count)
        for name in ("je_x", "je_y", "jm_x", "jm_y"):
            arr = getattr(self, name)
            if arr.shape != shape:
                raise GeometryError(f"{name} shape {arr.shape} != grid shape {shape}")
            if not np.all(np.isfinite(arr)):
                raise GeometryError(f"{name} contains non-finite values")


@dataclass(frozen=True)
class ObservationPoint:
    """Observation location in panel spherical coordinates (r [m], theta, phi [rad])."""

    r: float
    theta: float
    phi: float

    def __post_init__(self):
        if self.r <= 0:
            raise GeometryError("observation distance must be positive")
        if not 0.0 <= self.theta <= math.pi / 2:
            raise GeometryError("observation polar angle must lie in the reflection half-space")

    @property
    def cartesian(self) -> np.ndarray:
        s, c = math.sin(self.theta), math.cos(self.theta)
        return self.r * np.array([s * math.cos(self.phi), s * math.sin(self.phi), c])


@dataclass(frozen=True)
class ScatteredField:
    """Scattered E-field components [V/m] along theta-hat and phi-hat."""

    e_theta: complex
    e_phi: complex

    @property
    def magnitude(self) -> float:
        return math.hypot(abs(self.e_theta), abs(self.e_phi))


def sinc(x):
    """sin(x)/x with the removable singularity at 0 evaluated as 1."""
    return np.sinc(np.asarray(x) / np.pi)


def beta(cell, obs: ObservationPoint):
    """Fresnel path-length term [m] of a cell barycenter toward an observation point.

    cell is (x_p, y_q) with scalar or array coordinates.
    """
    x = np.asarray(cell[0], dtype=float)
    y = np.asarray(cell[1], dtype=float)
    s, c = math.sin(obs.theta), math.cos(obs.theta)
    sp, cp = math.sin(obs.phi), math.cos(obs.phi)
    return (x * s * cp + y * s * sp
            - c * c * (x * x + y * y) / (2.0 * obs.r)
            - (x * s * sp - y * s * cp) ** 2 / (2.0 * obs.r))


def fresnel_min_distance(side_l: float, wavelength: float) -> float:
    """Smallest observation distance [m] where the Fresnel field model is trusted."""
    if side_l <= 0 or wavelength <= 0:
        raise DomainError("panel side and wavelength must be positive")
    diag = side_l * math.sqrt(2.0)
    return max(10.0 * diag,
               0.62 * math.sqrt(2.0 * side_l**3 * math.sqrt(2.0) / wavelength),
               10.0 * wavelength)


def check_fresnel(side_l: float, wavelength: float, r: float, mode: str = "warn") -> bool:
    """Check r against the Fresnel bound; warn, raise or stay silent per mode."""
    if mode not in ("warn", "strict", "off"):
        raise ConfigError(f"unknown Fresnel mode {mode!r}")
    ok = r >= fresnel_min_distance(side_l, wavelength)
    if not ok and mode == "strict":
        raise FresnelValidityError(
            f"observation at r = {r:.3f} m is inside the Fresnel bound "
            f"{fresnel_min_distance(side_l, wavelength):.3f} m for L = {side_l:.3f} m")
    if not ok and mode == "warn":
        warnings.warn(
            f"observation at r = {r:.3f} m is inside the Fresnel bound for "
            f"L = {side_l:.3f} m; field values there are approximate",
            FresnelValidityWarning, stacklevel=3)
    return ok


def _ordered_sum(values_pq: np.ndarray) -> complex:
    """Sum cell contributions in (q outer, p inner) order.

    Uses numpy pairwise summation for small grids and block-compensated
    (Kahan) accumulation above _COMPENSATED_THRESHOLD cells so large panels
    sum reproducibly.
    """
    seq = values_pq.T.reshape(-1)
    if seq.size <= _COMPENSATED_THRESHOLD:
        return complex(seq.sum())
    total = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    for start in range(0, seq.size, 65536):
        y = complex(seq[start:start + 65536].sum()) - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def _brackets(currents: SurfaceCurrents, theta, phi, eta: float):
    """Theta-hat and phi-hat current combinations of the radiation sum."""
    ct = np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    bth = (eta * ct * cp * currents.je_x + eta * ct * sp * currents.je_y
           - sp * currents.jm_x + cp * currents.jm_y)
    bph = (-eta * sp * currents.je_x + eta * cp * currents.je_y
           + ct * cp * currents.jm_x + ct * sp * currents.jm_y)
    return bth, bph


def scattered_field(currents: SurfaceCurrents, obs: ObservationPoint,
                    wavelength: float, eta: float = ETA0,
                    fresnel: str = "warn") -> ScatteredField:
    """Scattered field at one observation point from the closed-form cell sum.

    Each cell contributes a phasor exp(j*2*pi/lambda * beta_pq) times the
    current brackets, under a common prefactor with the per-cell sinc element
    factors. fresnel selects the validity check mode: warn, strict or off.
    """
    grid = currents.grid
    check_fresnel(grid.side_l, wavelength, obs.r, fresnel)
    X, Y = grid.cell_grid()
    k = 2.0 * math.pi / wavelength
    s = math.sin(obs.theta)
    sp, cp = math.sin(obs.phi), math.cos(obs.phi)
    pre = (-1j * np.exp(-1j * k * obs.r) / (2.0 * wavelength * obs.r)
           * grid.pitch**2
           * sinc(math.pi * grid.pitch * s * cp / wavelength)
           * sinc(math.pi * grid.pitch * s * sp / wavelength))
    phase = np.exp(1j * (2.0 * math.pi / wavelength) * beta((X, Y), obs))
    bth, bph = _brackets(currents, obs.theta, obs.phi, eta)
    return ScatteredField(e_theta=pre * _ordered_sum(phase * bth),
                          e_phi=pre * _ordered_sum(phase * bph))


def scattered_field_at_points(currents: SurfaceCurrents, points: np.ndarray,
                              wavelength: float, eta: float = ETA0):
    """Vectorized scattered field at Cartesian points of shape (N, 3).

    Returns (e_theta, e_phi) arrays of shape (N,). Points must lie in the
    reflection half-space z > 0. No Fresnel check is applied here; callers
    sampling maps validate their cut definition instead.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if np.any(pts[:, 2] <= 0.0):
        raise GeometryError("observation points must lie in the half-space z > 0")
    grid = currents.grid
    X, Y = grid.cell_grid()
    xs = X.T.reshape(-1)       # (q outer, p inner) cell order
    ys = Y.T.reshape(-1)
    je_x = currents.je_x.T.reshape(-1)
    je_y = currents.je_y.T.reshape(-1)
    jm_x = currents.jm_x.T.reshape(-1)
    jm_y = currents.jm_y.T.reshape(-1)
    k = 2.0 * math.pi / wavelength

    r = np.linalg.norm(pts, axis=1)
    ct = pts[:, 2] / r
    st = np.sqrt(np.maximum(0.0, 1.0 - ct * ct))
    ph = np.arctan2(pts[:, 1], pts[:, 0])
    sp, cp = np.sin(ph), np.cos(ph)

    e_theta = np.empty(pts.shape[0], dtype=complex)
    e_phi = np.empty(pts.shape[0], dtype=complex)
    for start in range(0, pts.shape[0], _POINT_CHUNK):
        sl = slice(start, min(start + _POINT_CHUNK, pts.shape[0]))
        rr, cc, ss = r[sl, None], ct[sl, None], st[sl, None]
        spp, cpp = sp[sl, None], cp[sl, None]
        b = (xs[None, :] * ss * cpp + ys[None, :] * ss * spp
             - cc * cc * (xs[None, :]**2 + ys[None, :]**2) / (2.0 * rr)
             - (xs[None, :] * ss * spp - ys[None, :] * ss * cpp) ** 2 / (2.0 * rr))
        phase = np.exp(1j * (2.0 * math.pi / wavelength) * b)
        bth = (eta * cc * cpp * je_x[None, :] + eta * cc * spp * je_y[None, :]
               - spp * jm_x[None, :] + cpp * jm_y[None, :])
        bph = (-eta * spp * je_x[None, :] + eta * cpp * je_y[None, :]
               + cc * cpp * jm_x[None, :] + cc * spp * jm_y[None, :])
        pre = (-1j * np.exp(-1j * k * rr[:, 0]) / (2.0 * wavelength * rr[:, 0])
               * grid.pitch**2
               * sinc(math.pi * grid.pitch * ss[:, 0] * cpp[:, 0] / wavelength)
               * sinc(math.pi * grid.pitch * ss[:, 0] * spp[:, 0] / wavelength))
        e_theta[sl] = pre * (phase * bth).sum(axis=1)
        e_phi[sl] = pre * (phase * bph).sum(axis=1)
    return e_theta, e_phi


def received_power(field: ScatteredField, g_rx: float, wavelength: float,
                   eta: float = ETA0) -> float:
    """Power [W] collected by a matched receiver of gain g_rx from the field."""
    return (wavelength**2 * g_rx
            * (abs(field.e_theta) ** 2 + abs(field.e_phi) ** 2)
            / (8.0 * math.pi * eta))


def quadrature_oracle(currents: SurfaceCurrents, obs: ObservationPoint,
                      wavelength: float, eta: float = ETA0,
                      subdivisions: int = 8) -> ScatteredField:
    """Independent field evaluation by sub-patch summation.

    Each cell is split into subdivisions^2 sub-patches; every sub-patch
    radiates with its exact spherical phase and 1/R spreading along its own
    direction to the observer, and the contributions are re-projected onto the
    observation point's spherical frame. Converges to the radiation integral
    of the piecewise-constant currents as subdivisions grows, so it checks the
    closed form's Fresnel phase expansion, uniform-amplitude approximation and
    per-cell sinc element factor at once.
    """
    if subdivisions < 1:
        raise DomainError("subdivisions must be at least 1")
    grid = currents.grid
    n = int(subdivisions)
    dsub = grid.pitch / n
    offsets = (np.arange(n) - (n - 1) / 2.0) * dsub
    ox, oy = np.meshgrid(offsets, offsets, indexing="ij")

    X, Y = grid.cell_grid()
    xs = (X[:, :, None] + ox.reshape(-1)[None, None, :]).reshape(-1)
    ys = (Y[:, :, None] + oy.reshape(-1)[None, None, :]).reshape(-1)
    rep = np.ones(n * n)
    je_x = (currents.je_x[:, :, None] * rep).reshape(-1)
    je_y = (currents.je_y[:, :, None] * rep).reshape(-1)
    jm_x = (currents.jm_x[:, :, None] * rep).reshape(-1)
    jm_y = (currents.jm_y[:, :, None] * rep).reshape(-1)

    robs = obs.cartesian
    dx = robs[0] - xs
    dy = robs[1] - ys
    dz = robs[2]
    R = np.sqrt(dx * dx + dy * dy + dz * dz)
    ct = dz / R
    st = np.sqrt(np.maximum(0.0, 1.0 - ct * ct))
    ph = np.arctan2(dy, dx)
    sp, cp = np.sin(ph), np.cos(ph)

    k = 2.0 * math.pi / wavelength
    pre = (-1j / (2.0 * wavelength * R) * dsub**2 * np.exp(-1j * k * R)
           * sinc(math.pi * dsub * st * cp / wavelength)
           * sinc(math.pi * dsub * st * sp / wavelength))
    bth = eta * ct * cp * je_x + eta * ct * sp * je_y - sp * jm_x + cp * jm_y
    bph = -eta * sp * je_x + eta * cp * je_y + ct * cp * jm_x + ct * sp * jm_y

    # local spherical unit vectors of each sub-patch direction, in Cartesian
    th_hat = np.stack([ct * cp, ct * sp, -st])
    ph_hat = np.stack([-sp, cp, np.zeros_like(sp)])
    e_cart = (pre * bth) * th_hat + (pre * bph) * ph_hat
    e_total = e_cart.sum(axis=1)

    s0, c0 = math.sin(obs.theta), math.cos(obs.theta)
    sp0, cp0 = math.sin(obs.phi), math.cos(obs.phi)
    th0 = np.array([c0 * cp0, c0 * sp0, -s0])
    ph0 = np.array([-sp0, cp0, 0.0])
    return ScatteredField(e_theta=complex(e_total @ th0), e_phi=complex(e_total @ ph0))


@dataclass(frozen=True)
class FieldCut:
    """A square field-map cut in the receiver-local frame.

    plane is "transversal" (perpendicular to the panel-to-receiver direction)
    or "longitudinal" (containing it); half_extent [m] and points set the
    sampling of each axis around the receiver.
    """

    plane: str
    half_extent: float
    points: int = 61

    def __post_init__(self):
        if self.plane not in ("transversal", "longitudinal"):
            raise ConfigError(f"unknown cut plane {self.plane!r}")
        if self.half_extent < 0:
            raise ConfigError("cut extent must be nonnegative")
        if self.points < 1:
            raise ConfigError("cut needs at least one sample point")


@dataclass(frozen=True)
class CutMap:
    """Sampled |E| magnitudes over a field cut; arrays indexed [u, v]."""

    cut: FieldCut
    u: np.ndarray            # receiver-local abscissa [m]
    v: np.ndarray            # receiver-local ordinate [m]
    e_phi_abs: np.ndarray    # dominant-component magnitude [V/m]
    e_total_abs: np.ndarray  # total field magnitude [V/m]


def receiver_frame(theta0: float):
    """Receiver-local orthonormal axes (x'', y'', z'') in panel Cartesian frame.

    z'' points from the panel center toward the receiver, y'' is the panel
    y axis, x'' completes the right-handed triple.
    """
    s, c = math.sin(theta0), math.cos(theta0)
    z2 = np.array([s, 0.0, c])
    x2 = np.array([c, 0.0, -s])
    y2 = np.array([0.0, 1.0, 0.0])
    return x2, y2, z2


def field_cut_map(currents: SurfaceCurrents, cut: FieldCut, scenario,
                  fresnel: str = "warn") -> CutMap:
    """Sample |E_sca| on a uniform grid in the receiver-local cut plane.

    The transversal cut spans (x'', y'') at z'' = 0 and the longitudinal cut
    spans (x'', z'') at y'' = 0, both centered on the receiver. The Fresnel
    check applies to the cut center; the map itself may sample the caustic
    region around it.
    """
    check_fresnel(currents.grid.side_l, scenario.wavelength, scenario.r_rx, fresnel)
    n = cut.points if cut.half_extent > 0 else 1
    axis = np.linspace(-cut.half_extent, cut.half_extent, n) if n > 1 else np.zeros(1)
    x2, y2, z2 = receiver_frame(scenario.theta0)
    center = scenario.rx_position
    U, V = np.meshgrid(axis, axis, indexing="ij")
    second = y2 if cut.plane == "transversal" else z2
    pts = (center[None, :]
           + U.reshape(-1)[:, None] * x2[None, :]
           + V.reshape(-1)[:, None] * second[None, :])
    e_theta, e_phi = scattered_field_at_points(currents, pts, scenario.wavelength)
    e_phi_abs = np.abs(e_phi).reshape(n, n)
    e_total_abs = np.sqrt(np.abs(e_theta) ** 2 + np.abs(e_phi) ** 2).reshape(n, n)
    return CutMap(cut=cut, u=axis, v=axis.copy(),
                  e_phi_abs=e_phi_abs, e_total_abs=e_total_abs)
