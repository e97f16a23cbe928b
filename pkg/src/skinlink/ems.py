"""Patterned-skin model: reflection lookup table, phase-conjugation synthesis,
sheet-transition currents, realized and bound path attenuation.

Cells are parametrized by a diagonal reflection tensor (gamma_xx, gamma_yy).
The per-cell currents follow from the averaged tangential fields: the incident
field is averaged over the cell, weighted by (1 +/- gamma) brackets, and turned
into equivalent currents J_e = 2 n x H_av, J_m = 2 n x E_av. The reflection
tensor pairs cross-polarized with H (gamma_yy weights E_y and H_x), so a
gamma = -1 sheet degenerates exactly to the conducting-screen current model
and gamma = +1 to the magnetic-wall limit.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .aperture import (ApertureGrid, DescriptorVector, descriptor_from_matrix,
                       discretize)
from .constants import ETA0
from .errors import ConfigError, DomainError, LayoutError
from .field_engine import (ObservationPoint, SurfaceCurrents, beta,
                           received_power, scattered_field, sinc)
from .scenario import LinkScenario, incident_fields

_GAMMA_MAG_TOL = 1e-9          # passivity slack on |gamma|
_SCURVE_SWING = 0.4            # S-curve slope modulation of the synthetic table


def wrap_phase(x):
    """Wrap angles [rad] to the interval (-pi, pi]."""
    wrapped = np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2.0 * np.pi)
    return wrapped if wrapped.ndim else float(wrapped)


@dataclass(frozen=True)
class ReflectionLookupTable:
    """Meta-atom geometry to diagonal reflection tensor map.

    g holds U strictly increasing geometry values [m]; gamma_xx and gamma_yy
    the matching complex reflection coefficients, passive (|gamma| <= 1).
    Lookups between entries interpolate magnitude and unwrapped phase linearly.
    """

    g: np.ndarray
    gamma_xx: np.ndarray
    gamma_yy: np.ndarray

    def __post_init__(self):
        if self.g.ndim != 1 or self.g.size < 2:
            raise ConfigError("reflection table needs at least two entries")
        if self.gamma_xx.shape != self.g.shape or self.gamma_yy.shape != self.g.shape:
            raise ConfigError("reflection table columns must share one length")
        if not np.all(np.diff(self.g) > 0):
            raise ConfigError("table geometry values must be strictly increasing")
        for name in ("gamma_xx", "gamma_yy"):
            mag = np.abs(getattr(self, name))
            if np.any(mag > 1.0 + _GAMMA_MAG_TOL):
                raise ConfigError(f"{name} violates passivity: |gamma| up to {mag.max():.6f}")

    @property
    def g_range(self):
        return float(self.g[0]), float(self.g[-1])

    def phase_span_yy(self) -> float:
        """Covered (unwrapped) phase span of gamma_yy [rad]."""
        unwrapped = np.unwrap(np.angle(self.gamma_yy))
        return float(unwrapped.max() - unwrapped.min())

    def _interp_column(self, gamma: np.ndarray, g_query: np.ndarray) -> np.ndarray:
        phase = np.unwrap(np.angle(gamma))
        mag = np.abs(gamma)
        return (np.interp(g_query, self.g, mag)
                * np.exp(1j * np.interp(g_query, self.g, phase)))

    def gamma_at(self, g_query):
        """Interpolated (gamma_xx, gamma_yy) at geometry values g_query [m]."""
        q = np.asarray(g_query, dtype=float)
        lo, hi = self.g_range
        if np.any(q < lo - 1e-12) or np.any(q > hi + 1e-12):
            raise LayoutError(
                f"geometry value outside table range [{lo:.6g}, {hi:.6g}] m")
        qc = np.clip(q, lo, hi)
        return self._interp_column(self.gamma_xx, qc), self._interp_column(self.gamma_yy, qc)

    def dense_grid(self, resolution: float = 1e-6):
        """Geometry values at the given resolution plus interpolated gamma_yy."""
        lo, hi = self.g_range
        steps = int(math.floor((hi - lo) / resolution + 0.5))
        g_fine = lo + np.arange(steps + 1) * resolution
        g_fine[-1] = min(g_fine[-1], hi)
        return g_fine, self._interp_column(self.gamma_yy, g_fine)


def synthetic_table(u_count: int = 64, phase_span: float = math.radians(300.0),
                    loss_db: float = 0.0, g_min: float = 0.3e-3,
                    g_max: float = 5.0e-3) -> ReflectionLookupTable:
    """Stand-in lookup table for a square-patch cell family.

    gamma_yy follows a smooth monotone S-curve of reflection phase over
    phase_span centered on 180 degrees (phase decreasing as the patch grows),
    with uniform magnitude 10^(-loss_db/20); gamma_xx mirrors gamma_yy.
    """
    if u_count < 2:
        raise ConfigError("synthetic table needs at least two entries")
    if not 0.0 < phase_span <= 2.0 * math.pi:
        raise ConfigError("phase span must lie in (0, 2*pi]")
    if loss_db < 0.0:
        raise ConfigError("loss must be nonnegative to keep the cells passive")
    if not 0.0 < g_min < g_max:
        raise ConfigError("geometry range must be positive and increasing")
    x = np.linspace(0.0, 1.0, u_count)
    scurve = x - _SCURVE_SWING * np.sin(2.0 * math.pi * x) / (2.0 * math.pi)
    psi = math.pi + phase_span / 2.0 - phase_span * scurve
    gamma = 10.0 ** (-loss_db / 20.0) * np.exp(1j * psi)
    g = np.linspace(g_min, g_max, u_count)
    return ReflectionLookupTable(g=g, gamma_xx=gamma.copy(), gamma_yy=gamma)


_TABLE_HEADER = ["g_m", "re_gamma_xx", "im_gamma_xx", "re_gamma_yy", "im_gamma_yy"]


def save_reflection_table(table: ReflectionLookupTable, path) -> None:
    """Write a table as CSV with rows sorted by geometry value."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_TABLE_HEADER)
        for i in range(table.g.size):
            writer.writerow([repr(float(table.g[i])),
                             repr(float(table.gamma_xx[i].real)),
                             repr(float(table.gamma_xx[i].imag)),
                             repr(float(table.gamma_yy[i].real)),
                             repr(float(table.gamma_yy[i].imag))])


def load_reflection_table(path) -> ReflectionLookupTable:
    """Load a CSV table (header g_m,re_gamma_xx,im_gamma_xx,re_gamma_yy,im_gamma_yy)."""
    with open(path, "r", encoding="ascii", newline="") as fh:
        return parse_reflection_table(fh.read())


def parse_reflection_table(text: str) -> ReflectionLookupTable:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ConfigError("empty reflection table") from None
    if [h.strip() for h in header] != _TABLE_HEADER:
        raise ConfigError(f"bad table header, expected {','.join(_TABLE_HEADER)}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 5:
            raise ConfigError(f"line {lineno}: expected 5 columns")
        try:
            rows.append([float(v) for v in row])
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from exc
    if len(rows) < 2:
        raise ConfigError("reflection table needs at least two entries")
    data = np.asarray(rows)
    return ReflectionLookupTable(
        g=data[:, 0],
        gamma_xx=data[:, 1] + 1j * data[:, 2],
        gamma_yy=data[:, 3] + 1j * data[:, 4])


@dataclass(frozen=True)
class TargetPhases:
    """Per-cell ideal current phases [rad], wrapped to (-pi, pi], indexed [p, q]."""

    values: np.ndarray

    def __post_init__(self):
        if self.values.ndim != 2:
            raise LayoutError("target phases must form a P x Q matrix")
        if np.any(self.values <= -math.pi - 1e-12) or np.any(self.values > math.pi + 1e-12):
            raise DomainError("target phases must be wrapped to (-pi, pi]")


@dataclass(frozen=True)
class EmsPanel:
    """A synthesized skin: grid, descriptor vector and the table it was built from."""

    grid: ApertureGrid
    d: DescriptorVector
    table: ReflectionLookupTable

    def __post_init__(self):
        if (self.d.p_count, self.d.q_count) != (self.grid.p_count, self.grid.q_count):
            raise LayoutError("descriptor cell counts do not match the grid")
        if abs(self.d.side_l - self.grid.side_l) > 1e-12:
            raise LayoutError("descriptor side does not match the grid side")
        lo, hi = self.table.g_range
        if np.any(self.d.values < lo - 1e-12) or np.any(self.d.values > hi + 1e-12):
            raise LayoutError("descriptor geometry outside the table range")


def average_incident_fields(grid: ApertureGrid, scenario: LinkScenario,
                            quadrature: str = "midpoint"):
    """Cell-averaged incident E and H, shape (3, P, Q).

    midpoint evaluates the field at the barycenter; gauss2 averages a 2x2
    Gauss-Legendre rule over each cell.
    """
    X, Y = grid.cell_grid()
    if quadrature == "midpoint":
        return incident_fields(scenario, X, Y)
    if quadrature == "gauss2":
        off = grid.pitch / (2.0 * math.sqrt(3.0))
        e_acc = None
        h_acc = None
        for dx in (-off, off):
            for dy in (-off, off):
                e, h = incident_fields(scenario, X + dx, Y + dy)
                e_acc = e if e_acc is None else e_acc + e
                h_acc = h if h_acc is None else h_acc + h
        return e_acc / 4.0, h_acc / 4.0
    raise ConfigError(f"unknown quadrature {quadrature!r}")


def reflection_currents(grid: ApertureGrid, scenario: LinkScenario,
                        gamma_xx, gamma_yy,
                        quadrature: str = "midpoint") -> SurfaceCurrents:
    """Equivalent surface currents of cells with the given reflection tensor.

    This is the single point where the reflection tensor is mapped to currents
    (the bilinear susceptibility correspondence composed with the averaged-field
    brackets, so the gamma = -1 pole is removable): averaged tangential fields
    E_av = (1 + gamma)/2 * E_inc and H_av = (1 - gamma)/2 * H_inc with the
    cross-polarized pairing, then J_e = 2 n x H_av and J_m = 2 n x E_av.
    gamma_xx/gamma_yy broadcast against the (P, Q) cell lattice.
    """
    e_inc, h_inc = average_incident_fields(grid, scenario, quadrature)
    gxx = np.broadcast_to(np.asarray(gamma_xx), e_inc.shape[1:])
    gyy = np.broadcast_to(np.asarray(gamma_yy), e_inc.shape[1:])
    e_av_x = 0.5 * (1.0 + gxx) * e_inc[0]
    e_av_y = 0.5 * (1.0 + gyy) * e_inc[1]
    h_av_x = 0.5 * (1.0 - gyy) * h_inc[0]
    h_av_y = 0.5 * (1.0 - gxx) * h_inc[1]
    return SurfaceCurrents(je_x=-2.0 * h_av_y, je_y=2.0 * h_av_x,
                           jm_x=-2.0 * e_av_y, jm_y=2.0 * e_av_x, grid=grid)


def ideal_current_phases(grid: ApertureGrid, scenario: LinkScenario) -> TargetPhases:
    """Phase-conjugation targets: minus the receiver-path phase of each cell."""
    obs = ObservationPoint(r=scenario.r_rx, theta=scenario.theta0, phi=scenario.phi_rx)
    X, Y = grid.cell_grid()
    k = 2.0 * math.pi / scenario.wavelength
    return TargetPhases(values=wrap_phase(-k * beta((X, Y), obs)))


def predicted_phase(table: ReflectionLookupTable, g_values, scenario: LinkScenario,
                    grid: ApertureGrid, quadrature: str = "midpoint") -> np.ndarray:
    """Phase of the dominant (y-polarized electric) cell current for given geometry."""
    _, gyy = table.gamma_at(g_values)
    _, h_inc = average_incident_fields(grid, scenario, quadrature)
    return np.angle((1.0 - gyy) * h_inc[0])


def _nearest_candidate(cand: np.ndarray, need: np.ndarray):
    """Index (per need) of the candidate phase at smallest wrapped distance.

    cand is ordered by ascending geometry value; exact distance ties resolve
    to the smaller geometry. Uses a bisection shortcut when the candidate
    phases are strictly monotone (no wrap crossing can occur because every
    1 - gamma has nonnegative real part), otherwise a chunked scan.
    """
    flat_need = need.reshape(-1)
    diffs = np.diff(cand)
    if np.all(diffs > 0) or np.all(diffs < 0):
        ascending = diffs[0] > 0
        view = cand if ascending else cand[::-1]
        pos = np.searchsorted(view, flat_need)
        below = np.clip(pos - 1, 0, cand.size - 1)
        above = np.clip(pos, 0, cand.size - 1)
        first = np.zeros_like(pos)
        last = np.full_like(pos, cand.size - 1)
        pool = np.stack([below, above, first, last])
        if not ascending:
            pool = cand.size - 1 - pool
        pool.sort(axis=0)  # ascending geometry, so argmin ties pick smaller g
        dist = np.abs(wrap_phase(cand[pool] - flat_need[None, :]))
        choice = np.argmin(dist, axis=0)
        idx = pool[choice, np.arange(flat_need.size)]
        best = dist[choice, np.arange(flat_need.size)]
    else:
        idx = np.empty(flat_need.size, dtype=int)
        best = np.empty(flat_need.size)
        chunk = max(1, 2_000_000 // cand.size)
        for start in range(0, flat_need.size, chunk):
            sl = slice(start, min(start + chunk, flat_need.size))
            dist = np.abs(wrap_phase(cand[None, :] - flat_need[sl, None]))
            idx[sl] = np.argmin(dist, axis=1)
            best[sl] = dist[np.arange(dist.shape[0]), idx[sl]]
    return idx.reshape(need.shape), best.reshape(need.shape)


def synthesize_layout(grid: ApertureGrid, table: ReflectionLookupTable,
                      targets: TargetPhases, scenario: LinkScenario,
                      resolution: float = 1e-6) -> DescriptorVector:
    """Pick each cell's geometry to best match its target current phase.

    The mismatch functional separates cell by cell, so the exact minimizer is
    a per-cell nearest-phase lookup over the table interpolated at the given
    geometry resolution. Matching targets the y-polarized electric current.
    """
    if targets.values.shape != (grid.p_count, grid.q_count):
        raise LayoutError("target phases do not match the grid")
    g_fine, gyy_fine = table.dense_grid(resolution)
    cand = np.angle(1.0 - gyy_fine)
    _, h_inc = average_incident_fields(grid, scenario)
    need = wrap_phase(targets.values - np.angle(h_inc[0]))
    idx, _ = _nearest_candidate(cand, need)
    return descriptor_from_matrix(grid.side_l, g_fine[idx])


def synthesis_mismatch(grid: ApertureGrid, table: ReflectionLookupTable,
                       d: DescriptorVector, targets: TargetPhases,
                       scenario: LinkScenario) -> float:
    """Total squared wrapped phase error of a layout against its targets [rad^2]."""
    pred = predicted_phase(table, d.as_matrix(), scenario, grid)
    err = wrap_phase(pred - targets.values)
    return float(np.sum(err * err))


def design_panel(scenario: LinkScenario, side_l: float,
                 table: ReflectionLookupTable, pitch: float | None = None,
                 centered: bool = False):
    """Discretize, target and synthesize a skin; returns (EmsPanel, TargetPhases)."""
    grid = discretize(side_l, pitch if pitch is not None else scenario.pitch,
                      centered=centered)
    targets = ideal_current_phases(grid, scenario)
    d = synthesize_layout(grid, table, targets, scenario)
    return EmsPanel(grid=grid, d=d, table=table), targets


def gstc_currents(panel: EmsPanel, scenario: LinkScenario,
                  quadrature: str = "midpoint") -> SurfaceCurrents:
    """Surface currents of a synthesized panel under the scenario's illumination."""
    gxx, gyy = panel.table.gamma_at(panel.d.as_matrix())
    return reflection_currents(panel.grid, scenario, gxx, gyy, quadrature)


def ems_tpa(scenario: LinkScenario, panel: EmsPanel,
            quadrature: str = "midpoint", fresnel: str = "warn") -> float:
    """Realized skin path attenuation P_rx/P_tx at the specular receiver."""
    currents = gstc_currents(panel, scenario, quadrature)
    obs = ObservationPoint(r=scenario.r_rx, theta=scenario.theta0, phi=scenario.phi_rx)
    field = scattered_field(currents, obs, scenario.wavelength, fresnel=fresnel)
    return received_power(field, scenario.g_rx, scenario.wavelength) / scenario.p_tx


def ems_received_power_matched(currents: SurfaceCurrents,
                               scenario: LinkScenario) -> float:
    """Received power [W] of a perfectly phase-matched panel, magnitude-only route.

    Sums the squared magnitude brackets cell by cell under the
    G_rx/(32*pi*eta*r_rx^2) prefactor. Relative to the full propagation route
    this drops the cell area, cell count and element factors; for uniform
    matched currents the two differ exactly by P*Q*pitch^4*sinc_x^2*sinc_y^2.
    """
    theta, phi = scenario.theta0, scenario.phi_rx
    ct = math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    ax, ay = np.abs(currents.je_x), np.abs(currents.je_y)
    mx, my = np.abs(currents.jm_x), np.abs(currents.jm_y)
    bth = ETA0 * ct * cp * ax + ETA0 * ct * sp * ay - sp * mx + cp * my
    bph = -ETA0 * sp * ax + ETA0 * cp * ay + ct * cp * mx + ct * sp * my
    total = float(np.sum(bth * bth + bph * bph))
    return scenario.g_rx * total / (32.0 * math.pi * ETA0 * scenario.r_rx**2)


def matched_route_scale(grid: ApertureGrid, scenario: LinkScenario) -> float:
    """Factor relating the magnitude-only route to the full propagation route."""
    s = math.sin(scenario.theta0)
    sp, cp = math.sin(scenario.phi_rx), math.cos(scenario.phi_rx)
    lam = scenario.wavelength
    sx = float(sinc(math.pi * grid.pitch * s * cp / lam))
    sy = float(sinc(math.pi * grid.pitch * s * sp / lam))
    return grid.cell_count * grid.pitch**4 * sx * sx * sy * sy


def ems_upper_bound_tpa(scenario: LinkScenario, side_l: float) -> float:
    """Ideal-skin path attenuation bound for a square panel of the given side."""
    if side_l <= 0:
        raise DomainError("panel side must be positive")
    return (scenario.g_tx * scenario.g_rx * math.cos(scenario.theta0) ** 2
            * side_l**4 / (4.0 * math.pi * scenario.r_tx * scenario.r_rx) ** 2)
