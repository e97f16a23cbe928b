"""Panel discretization into square cells and per-cell meta-atom descriptors."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, LayoutError


@dataclass(frozen=True)
class ApertureGrid:
    """P x Q square-cell lattice over a square panel.

    side_l is snapped to p_count*pitch so the cells tile the panel exactly.
    Barycenters follow x_p = -L/2 + p*pitch (and likewise y_q); with
    centered=True they are shifted by +pitch/2 to sit in the cell middles.
    """

    side_l: float          # panel side after snapping [m]
    pitch: float           # cell pitch [m]
    p_count: int
    q_count: int
    centered: bool = False

    @property
    def cell_count(self) -> int:
        return self.p_count * self.q_count

    @property
    def x_centers(self) -> np.ndarray:
        off = self.pitch / 2.0 if self.centered else 0.0
        return -self.side_l / 2.0 + np.arange(self.p_count) * self.pitch + off

    @property
    def y_centers(self) -> np.ndarray:
        off = self.pitch / 2.0 if self.centered else 0.0
        return -self.side_l / 2.0 + np.arange(self.q_count) * self.pitch + off

    def cell_grid(self):
        """Meshgrids (X, Y) of barycenters, indexed [p, q]."""
        return np.meshgrid(self.x_centers, self.y_centers, indexing="ij")


def discretize(side_l: float, pitch: float, centered: bool = False) -> ApertureGrid:
    """Split a square panel of side side_l into cells of the given pitch.

    The cell count per axis is round(side_l/pitch) (half away from zero) and
    the side is snapped to an exact multiple of the pitch.
    """
    if side_l <= 0 or pitch <= 0:
        raise GeometryError("panel side and pitch must be positive")
    if side_l < pitch:
        raise GeometryError(f"panel side {side_l} m is smaller than one cell ({pitch} m)")
    p = int(math.floor(side_l / pitch + 0.5))
    return ApertureGrid(side_l=p * pitch, pitch=pitch, p_count=p, q_count=p,
                        centered=centered)


@dataclass(frozen=True)
class DescriptorVector:
    """Panel descriptors: the side plus per-cell meta-atom geometry values.

    values holds g_pq^b in the flattened order s - 1 = b + (p + q*Q)*B, so the
    full vector is (side_l,) + values with total length 1 + B*P*Q.
    """

    side_l: float
    values: np.ndarray     # shape (B*P*Q,), geometry values [m]
    p_count: int
    q_count: int
    b_count: int = 1

    def __post_init__(self):
        if self.p_count != self.q_count:
            raise LayoutError("panels are square: P must equal Q")
        expected = self.b_count * self.p_count * self.q_count
        if self.values.shape != (expected,):
            raise LayoutError(
                f"descriptor length {self.values.shape} != B*P*Q = {expected}")

    @property
    def length(self) -> int:
        """Total descriptor count S = 1 + B*P*Q."""
        return 1 + self.values.size

    def flat_index(self, b: int, p: int, q: int) -> int:
        """Position s of g_pq^b in the full descriptor vector."""
        if not (0 <= b < self.b_count and 0 <= p < self.p_count and 0 <= q < self.q_count):
            raise LayoutError(f"descriptor index (b={b}, p={p}, q={q}) out of range")
        return 1 + b + (p + q * self.q_count) * self.b_count

    def unflatten_index(self, s: int):
        """Inverse of flat_index: s -> (b, p, q)."""
        if not 1 <= s < self.length:
            raise LayoutError(f"descriptor position {s} out of range")
        rem, b = divmod(s - 1, self.b_count)
        q, p = divmod(rem, self.p_count)
        return b, p, q

    def g(self, p: int, q: int, b: int = 0) -> float:
        return float(self.values[self.flat_index(b, p, q) - 1])

    def as_matrix(self, b: int = 0) -> np.ndarray:
        """Geometry values as a (P, Q) matrix indexed [p, q] for one descriptor."""
        cube = self.values.reshape(self.q_count, self.p_count, self.b_count)
        return cube[:, :, b].T.copy()


def descriptor_from_matrix(side_l: float, matrix: np.ndarray) -> DescriptorVector:
    """Build a single-descriptor (B = 1) vector from a (P, Q) geometry matrix."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2:
        raise LayoutError("geometry matrix must be two-dimensional")
    p_count, q_count = m.shape
    return DescriptorVector(side_l=side_l, values=m.T.reshape(-1).copy(),
                            p_count=p_count, q_count=q_count, b_count=1)


def scenario_fingerprint(scenario) -> str:
    """Short stable hash of the scenario fields, for layout provenance."""
    payload = json.dumps(
        {
            "f": scenario.f,
            "p_tx": scenario.p_tx,
            "g_tx": scenario.g_tx,
            "g_rx": scenario.g_rx,
            "r_tx": scenario.r_tx,
            "r_rx": scenario.r_rx,
            "theta0": scenario.theta0,
            "delta": scenario.delta,
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("ascii")).hexdigest()[:16]


def export_layout(d: DescriptorVector, grid: ApertureGrid, f_hz: float,
                  scenario_hash: str = "") -> str:
    """Serialize a layout to a JSON document (decimal round-trip exact).

    The document carries meta {f_hz, L_m, delta_m, B, scenario_hash} and the
    cells as P rows by Q columns of geometry values in meters.
    """
    if d.p_count != grid.p_count or d.q_count != grid.q_count:
        raise LayoutError("descriptor cell counts do not match the grid")
    if d.length != 1 + d.b_count * grid.p_count * grid.q_count:
        raise LayoutError("descriptor length inconsistent with the grid")
    doc = {
        "meta": {
            "f_hz": f_hz,
            "L_m": grid.side_l,
            "delta_m": grid.pitch,
            "B": d.b_count,
            "scenario_hash": scenario_hash,
        },
        "cells": [[d.g(p, q) for q in range(d.q_count)] for p in range(d.p_count)],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def import_layout(text: str):
    """Parse an export_layout document; returns (DescriptorVector, meta dict)."""
    try:
        doc = json.loads(text)
        meta = doc["meta"]
        cells = np.asarray(doc["cells"], dtype=float)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise LayoutError(f"malformed layout document: {exc}") from exc
    if cells.ndim != 2:
        raise LayoutError("layout cells must form a matrix")
    if int(meta.get("B", 1)) != 1:
        raise LayoutError("only single-descriptor (B = 1) layouts are supported")
    d = descriptor_from_matrix(float(meta["L_m"]), cells)
    return d, meta
