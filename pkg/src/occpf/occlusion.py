"""Shadow wedges behind occluding vehicles, visibility labels and the occlusion flag.

The sensor is a point at the ego's geometric center with unlimited range.
A target is Occluded only when one single occluder hides all four of its
corners; partial visibility counts as Visible.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

from . import kernels
from .errors import GeometryError, StateError
from .model import Point

VISIBLE = "Visible"
OCCLUDED = "Occluded"


@dataclass(frozen=True)
class ShadowWedge:
    apex: Point
    lower: Point  # silhouette corner at the clockwise-most bearing
    upper: Point  # silhouette corner at the counter-clockwise-most bearing

    @property
    def boundary_lines(self) -> tuple[tuple[Point, Point], tuple[Point, Point]]:
        """Directed lines apex -> silhouette corner."""
        return (self.apex, self.lower), (self.apex, self.upper)

    @property
    def near_cut(self) -> tuple[Point, Point]:
        """Chord through the silhouette corners; the shadow lies beyond it."""
        return self.lower, self.upper

    def contains(self, p: Point) -> bool:
        occ = _flat((self.lower, self.upper, self.lower, self.upper))
        return kernels.in_shadow(self.apex[0], self.apex[1], occ, 0, 1, p[0], p[1])


@dataclass(frozen=True)
class VisibilityLabel:
    value: str
    occluded_by: Optional[str] = None


@dataclass(frozen=True)
class TrackLabel:
    """Per-track perception state carried between steps."""

    visibility: str = VISIBLE
    occluded_by: Optional[str] = None
    occluded_origin: bool = False
    first_reveal_time: Optional[float] = None
    ever_occluded: bool = False
    safe_since: Optional[float] = None


def _flat(pts: Sequence[Point]) -> tuple[float, ...]:
    return tuple(c for p in pts for c in p)


def _inside_convex(p: Point, quad: Sequence[Point]) -> bool:
    sign = 0.0
    for i in range(4):
        ax, ay = quad[i]
        bx, by = quad[(i + 1) % 4]
        c = (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax)
        if c == 0.0:
            continue
        if sign == 0.0:
            sign = c
        elif (c > 0) != (sign > 0):
            return False
    return True


def shadow_wedge(ego_point: Point, occluder: Sequence[Point]) -> ShadowWedge:
    """Wedge bounded by the rays from ``ego_point`` through the occluder's silhouette corners."""
    if _inside_convex(ego_point, occluder):
        raise GeometryError("viewpoint lies inside the occluder")
    i_lo, i_hi = kernels.silhouette(ego_point[0], ego_point[1], _flat(occluder))
    return ShadowWedge(tuple(ego_point), tuple(occluder[i_lo]), tuple(occluder[i_hi]))


def classify_visibility(ego_point: Point, occluders: Mapping[str, Sequence[Point]],
                        target: Sequence[Point]) -> VisibilityLabel:
    """Occluded iff some single occluder's wedge holds every target corner."""
    ex, ey = ego_point
    tgt = _flat(target)
    for occ_id, occ in occluders.items():
        if kernels.hidden_by(ex, ey, _flat(occ), tgt):
            return VisibilityLabel(OCCLUDED, occ_id)
    return VisibilityLabel(VISIBLE)


def update_labels(labels: Mapping[str, TrackLabel], visibility: Mapping[str, VisibilityLabel],
                  t: float, safety: Mapping[str, tuple[bool, bool]],
                  last_t: Optional[float] = None, release_hold: float = 1.0) -> dict[str, TrackLabel]:
    """Advance every track's label by one step.

    ``safety[id]`` is ``(gaps_safe, behind_ego)``: whether both gaps meet
    their RSS distances this step, and whether the obstacle is behind the
    ego. An Occluded -> Visible transition (re)arms ``occluded_origin``;
    it is released after ``release_hold`` seconds of continuous safety or
    as soon as the obstacle falls behind.
    """
    if last_t is not None and t < last_t:
        raise StateError(f"update_labels called with t={t} after t={last_t}")
    out = {}
    for tid, vis in visibility.items():
        lab = labels.get(tid, TrackLabel())
        was_occluded = lab.visibility == OCCLUDED
        lab = replace(lab, visibility=vis.value, occluded_by=vis.occluded_by,
                      ever_occluded=lab.ever_occluded or vis.value == OCCLUDED)
        if was_occluded and vis.value == VISIBLE:
            lab = replace(lab, occluded_origin=True, first_reveal_time=t, safe_since=None)
        elif lab.occluded_origin:
            safe, behind = safety.get(tid, (False, False))
            if behind:
                lab = replace(lab, occluded_origin=False, safe_since=None)
            elif safe:
                since = lab.safe_since if lab.safe_since is not None else t
                if t - since >= release_hold - 1e-9:
                    lab = replace(lab, occluded_origin=False, safe_since=None)
                else:
                    lab = replace(lab, safe_since=since)
            else:
                lab = replace(lab, safe_since=None)
        out[tid] = lab
    return out


def occlusion_flag(labels: Mapping[str, TrackLabel]) -> int:
    return int(any(lab.visibility == OCCLUDED for lab in labels.values()))


class LabelTracker:
    """Holds the labels of one run and enforces monotone time."""

    def __init__(self, track_ids: Sequence[str], release_hold: float = 1.0):
        self.labels = {tid: TrackLabel() for tid in track_ids}
        self.release_hold = release_hold
        self.last_t: Optional[float] = None
        self.transition_times: list[float] = []
        self._flag: Optional[int] = None

    def update(self, visibility, t, safety) -> dict[str, TrackLabel]:
        self.labels = update_labels(self.labels, visibility, t, safety,
                                    self.last_t, self.release_hold)
        self.last_t = t
        flag = occlusion_flag(self.labels)
        if self._flag is not None and flag != self._flag:
            self.transition_times.append(t)
        self._flag = flag
        return self.labels

    @property
    def flag(self) -> int:
        return self._flag or 0

