"""Scenario files: a JSON document with ``road``, ``ego``, ``obstacles``,
``goal_x``, ``pf``, ``rss`` and ``sim`` blocks, plus optional ``dynamics``
and ``planner`` blocks.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Tuple

from .dynamics import DynamicsParams
from .errors import ParseError, ValidationError
from .model import ManeuverScript, ObstacleTrack, RoadModel, VehicleBody, VehicleState
from .planner import PlannerParams
from .potential import PfParams
from .rss import RssParams

log = logging.getLogger(__name__)

TOP_KEYS = {"road", "ego", "obstacles", "goal_x", "pf", "rss", "sim", "dynamics", "planner"}
REQUIRED_TOP = {"road", "ego", "obstacles", "goal_x", "pf", "rss", "sim"}


@dataclass(frozen=True)
class Scenario:
    road: RoadModel
    ego: VehicleState
    ego_body: VehicleBody
    obstacles: Tuple[ObstacleTrack, ...]
    goal_x: float
    pf: PfParams
    rss: RssParams
    dt: float
    duration: float
    dynamics: DynamicsParams = field(default_factory=DynamicsParams)
    planner: PlannerParams = field(default_factory=PlannerParams)

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        if not (0 < self.dt <= 0.1):
            raise ValidationError("dt must be in (0, 0.1]")
        if not self.duration > 0:
            raise ValidationError("sim.duration must be positive")
        if not self.goal_x > self.ego.x:
            raise ValidationError("goal_x must lie ahead of the ego")
        if not self.road.on_road(self.ego.y):
            raise ValidationError("ego off-road")
        if abs(self.ego.steer) > self.dynamics.steer_limit:
            raise ValidationError("ego steer exceeds steer_limit")
        ids = [o.id for o in self.obstacles]
        if len(set(ids)) != len(ids):
            raise ValidationError("obstacle ids must be unique")
        for o in self.obstacles:
            if not self.road.on_road(o.y):
                raise ValidationError(f"obstacle off-road: {o.id}")
            for m in o.maneuvers:
                if m.target_lane is not None and not 1 <= m.target_lane <= self.road.num_lanes:
                    raise ValidationError(f"obstacle {o.id}: target_lane out of range")

    def without_obstacles(self) -> "Scenario":
        return replace(self, obstacles=())

    def calibrated(self) -> "Scenario":
        """Copy with ``pf.f_c`` filled in by calibration when it is unset."""
        if self.pf.f_c is not None:
            return self
        from .planner import calibrate_criterion_force
        f_c = calibrate_criterion_force(self.without_obstacles())
        return replace(self, pf=replace(self.pf, f_c=f_c))


def _check_keys(block: dict, allowed: set, where: str, lenient: bool) -> None:
    unknown = set(block) - allowed
    if unknown:
        msg = f"unknown keys in {where}: {sorted(unknown)}"
        if not lenient:
            raise ValidationError(msg)
        log.warning(msg)


def _build(cls, block: Any, where: str, lenient: bool, rename: Optional[dict] = None):
    if not isinstance(block, dict):
        raise ValidationError(f"{where} must be an object")
    rename = rename or {}
    names = {f.name for f in fields(cls)}
    allowed = {rename.get(n, n) for n in names} | set(rename)
    _check_keys(block, allowed, where, lenient)
    inverse = {v: k for k, v in rename.items()}
    kwargs = {inverse.get(k, k): v for k, v in block.items() if inverse.get(k, k) in names}
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ValidationError(f"{where}: {exc}") from None


_PF_RENAME = {"lam": "lambda"}


def scenario_from_dict(doc: dict, lenient: bool = False) -> Scenario:
    if not isinstance(doc, dict):
        raise ValidationError("scenario must be a JSON object")
    _check_keys(doc, TOP_KEYS, "scenario", lenient)
    missing = REQUIRED_TOP - set(doc)
    if missing:
        raise ValidationError(f"missing top-level keys: {sorted(missing)}")

    road_doc = dict(doc["road"])
    _check_keys(road_doc, {f.name for f in fields(RoadModel)}, "road", lenient)
    try:
        base = RoadModel.uniform(road_doc["num_lanes"], road_doc["lane_width"],
                                 road_doc.get("y_lower_edge", 0.0),
                                 road_doc["speed_limit"], road_doc["mu"],
                                 road_doc.get("g", 9.81))
    except KeyError as exc:
        raise ValidationError(f"road: missing {exc.args[0]}") from None
    road = RoadModel(
        base.num_lanes, base.lane_width, base.y_lower_edge,
        road_doc.get("y_upper_edge", base.y_upper_edge),
        tuple(road_doc.get("divider_positions", base.divider_positions)),
        tuple(road_doc.get("lane_centers", base.lane_centers)),
        base.speed_limit, base.mu, base.g,
    )

    ego_doc = dict(doc["ego"])
    body = _build(VehicleBody, ego_doc.pop("body", {}), "ego.body", lenient)
    ego = _build(VehicleState, ego_doc, "ego", lenient)

    obstacles = []
    if not isinstance(doc["obstacles"], list):
        raise ValidationError("obstacles must be a list")
    for i, ob in enumerate(doc["obstacles"]):
        ob = dict(ob)
        where = f"obstacles[{i}]"
        ob_body = _build(VehicleBody, ob.pop("body", {}), where + ".body", lenient)
        mans = tuple(_build(ManeuverScript, m, f"{where}.maneuvers[{j}]", lenient)
                     for j, m in enumerate(ob.pop("maneuvers", [])))
        _check_keys(ob, {"id", "x", "y", "v", "v_lat"}, where, lenient)
        try:
            obstacles.append(ObstacleTrack(id=str(ob["id"]), x=ob["x"], y=ob["y"], v=ob["v"],
                                           v_lat=ob.get("v_lat", 0.0), body=ob_body,
                                           maneuvers=mans))
        except KeyError as exc:
            raise ValidationError(f"{where}: missing {exc.args[0]}") from None

    pf = _build(PfParams, doc["pf"], "pf", lenient, _PF_RENAME)
    rss = _build(RssParams, doc["rss"], "rss", lenient)
    dyn_doc = dict(doc.get("dynamics", {}))
    for key in ("steer_limit", "steer_rate_limit"):
        if key + "_deg" in dyn_doc:
            dyn_doc[key] = math.radians(dyn_doc.pop(key + "_deg"))
    dynamics = _build(DynamicsParams, dyn_doc, "dynamics", lenient)
    planner = _build(PlannerParams, doc.get("planner", {}), "planner", lenient)

    sim = doc["sim"]
    _check_keys(sim, {"dt", "duration"}, "sim", lenient)
    try:
        dt, duration = float(sim["dt"]), float(sim["duration"])
    except KeyError as exc:
        raise ValidationError(f"sim: missing {exc.args[0]}") from None
    try:
        goal_x = float(doc["goal_x"])
    except (TypeError, ValueError):
        raise ValidationError("goal_x must be a number") from None

    return Scenario(road, ego, body, tuple(obstacles), goal_x, pf, rss, dt, duration,
                    dynamics, planner)


def load_scenario(path: str | Path, lenient: bool = False) -> Scenario:
    """Read and validate a scenario file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return scenario_from_dict(doc, lenient)


def scenario_to_dict(sc: Scenario) -> dict:
    """Inverse of :func:`scenario_from_dict`; every resolved constant is written out."""
    road = asdict(sc.road)
    road["divider_positions"] = list(sc.road.divider_positions)
    road["lane_centers"] = list(sc.road.lane_centers)
    ego = asdict(sc.ego)
    ego["body"] = asdict(sc.ego_body)
    obstacles = []
    for o in sc.obstacles:
        obstacles.append({
            "id": o.id, "x": o.x, "y": o.y, "v": o.v, "v_lat": o.v_lat,
            "body": asdict(o.body),
            "maneuvers": [asdict(m) for m in o.maneuvers],
        })
    pf = asdict(sc.pf)
    pf["lambda"] = pf.pop("lam")
    return {
        "road": road,
        "ego": ego,
        "obstacles": obstacles,
        "goal_x": sc.goal_x,
        "pf": pf,
        "rss": asdict(sc.rss),
        "sim": {"dt": sc.dt, "duration": sc.duration},
        "dynamics": asdict(sc.dynamics),
        "planner": asdict(sc.planner),
    }


def dump_scenario(sc: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(sc), indent=2) + "\n")


def bundled_scenario_path(name: str = "paper_fig3") -> Path:
    """Path of a scenario shipped with the package."""
    ref = resources.files("occpf") / "scenarios" / f"{name}.scenario"
    return Path(str(ref))

