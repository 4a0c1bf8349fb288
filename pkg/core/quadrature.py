"""
QUADRATURE - Simpson komposit pada grid yang sejajar breakpoint + estimasi error Richardson
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from config.settings import settings
from core.errors import ValidationError


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform sub-grids per protocol segment.

    segments[k] = (start, stop) index range (inclusive stop) of segment k in s.
    An interior breakpoint appears twice: as the closing node of the left
    segment and as the opening node of the right one, so each segment is
    sampled with its own one-sided drive. Every segment holds an even number
    of panels.
    """

    s: np.ndarray
    segments: tuple

    @classmethod
    def from_pieces(cls, pieces):
        segments, start = [], 0
        for piece in pieces:
            segments.append((start, start + len(piece) - 1))
            start += len(piece)
        return cls(s=np.concatenate(pieces), segments=tuple(segments))

    def pieces(self):
        return [self.s[start:stop + 1] for start, stop in self.segments]

    @property
    def segment_index(self):
        """Protocol segment of every node"""
        index = np.empty(len(self.s), dtype=int)
        for k, (start, stop) in enumerate(self.segments):
            index[start:stop + 1] = k
        return index

    @property
    def coarse_index(self):
        """Indices of the nodes kept by coarsen()"""
        return np.concatenate([np.arange(start, stop + 1, 2) for start, stop in self.segments])

    @property
    def report_index(self):
        """coarse_index with one node per distinct s (right limit at interior breakpoints)"""
        closing = [stop for _, stop in self.segments[:-1]]
        index = self.coarse_index
        return index[~np.isin(index, closing)]

    def integrate(self, values):
        """Composite Simpson over the last axis of values"""
        values = np.asarray(values, dtype=float)
        total = 0.0
        for start, stop in self.segments:
            total = total + simpson(values[..., start:stop + 1], x=self.s[start:stop + 1], axis=-1)
        return total

    def coarsen(self):
        """Every other point of each segment; panels per segment halve"""
        return QuadratureGrid.from_pieces([piece[::2] for piece in self.pieces()])

    def refine(self):
        """Midpoints inserted everywhere; panels per segment double"""
        fine_pieces = []
        for piece in self.pieces():
            fine = np.empty(2 * len(piece) - 1)
            fine[::2] = piece
            fine[1::2] = 0.5 * (piece[:-1] + piece[1:])
            fine_pieces.append(fine)
        return QuadratureGrid.from_pieces(fine_pieces)

    @property
    def panels(self):
        return sum(stop - start for start, stop in self.segments)


def check_grid(grid):
    if (not isinstance(grid, (int, np.integer)) or isinstance(grid, bool)
            or grid < settings.MIN_GRID or grid & (grid - 1)):
        raise ValidationError(f"grid must be a power of two >= {settings.MIN_GRID}, got {grid!r}")
    return int(grid)


def breakpoint_grid(breakpoints, grid):
    """About `grid` panels over [0, 1], split by segment length, even per segment"""
    grid = check_grid(grid)
    breakpoints = np.asarray(breakpoints, dtype=float)
    pieces = []
    for a, b in zip(breakpoints[:-1], breakpoints[1:]):
        panels = max(2, 2 * int(round(grid * (b - a) / 2)))
        pieces.append(np.linspace(a, b, panels + 1))
    return QuadratureGrid.from_pieces(pieces)


def richardson(fine_value, coarse_value):
    """Simpson is fourth order: error of the fine value ~ |fine - coarse| / 15"""
    return np.abs(np.asarray(fine_value) - np.asarray(coarse_value)) / 15.0


def integrate_with_error(quad_grid, values):
    """(fine integral, Richardson error) for values sampled on quad_grid"""
    fine = quad_grid.integrate(values)
    coarse = quad_grid.coarsen().integrate(np.asarray(values)[..., quad_grid.coarse_index])
    return fine, richardson(fine, coarse)
