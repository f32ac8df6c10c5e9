"""TOML scenario files, the built-in published scenario, and run records."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

import tomli
import tomli_w

from . import __version__
from .params import BioParams, DiffusionSpec, DomainError, EconParams, ModelVariant
from .simulation import ControlSchedule


class ScenarioError(DomainError):
    """Malformed or invalid scenario document."""


@dataclass(frozen=True)
class SimulationSettings:
    x1_0: float
    x2_0: float
    horizon: float
    step: float = 0.01
    schedule: ControlSchedule = ControlSchedule.constant(0.0)


@dataclass(frozen=True)
class Scenario:
    name: str
    variant: ModelVariant
    bio: BioParams
    econ: EconParams
    diffusion: DiffusionSpec
    simulation: SimulationSettings | None = None
    description: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.name:
            raise ScenarioError("scenario name must be nonempty")

    def with_bio(self, **changes: Any) -> Scenario:
        return dataclasses.replace(self, bio=dataclasses.replace(self.bio, **changes))

    def with_econ(self, **changes: Any) -> Scenario:
        return dataclasses.replace(self, econ=dataclasses.replace(self.econ, **changes))


PAPER_P_NOTE = (
    "price p=0.3 is reverse-engineered from the global equilibrium formula x2*=c(1-alpha)/(pq) "
    "and the reported global equilibrium x2*=0.125; no price is reported"
)

PAPER_SCENARIO = Scenario(
    name="paper",
    variant=ModelVariant.PATCHES_RESERVE,
    bio=BioParams(r1=0.4, r2=0.05, alpha=0.5, r=0.28739),
    econ=EconParams(p=0.3, q=2.0, c=0.15, delta=0.05, e_max=1.0),
    diffusion=DiffusionSpec.constant(20.0),
    description=PAPER_P_NOTE,
)

_TOP_KEYS = {"name", "variant", "description", "bio", "econ", "diffusion", "simulation"}
_BIO_KEYS = {"r1", "r2", "r", "alpha"}
_ECON_KEYS = {"p", "q", "c", "delta", "e_max"}
_DIFF_KEYS = {"mode", "lambda", "lambda0"}
_SIM_KEYS = {"x1_0", "x2_0", "horizon", "step", "effort"}


def _check_keys(table: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(table) - allowed)
    if unknown:
        raise ScenarioError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _table(doc: dict, key: str, required: bool = True) -> dict | None:
    if key not in doc:
        if required:
            raise ScenarioError(f"missing table [{key}]")
        return None
    if not isinstance(doc[key], dict):
        raise ScenarioError(f"[{key}] must be a table")
    return doc[key]


def _number(table: dict, key: str, where: str, default: float | None = None) -> float:
    if key not in table:
        if default is None:
            raise ScenarioError(f"missing key {where}.{key}")
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioError(f"{where}.{key} must be a number, got {v!r}")
    return float(v)


def _schedule(value: Any) -> ControlSchedule:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return ControlSchedule.constant(float(value))
    if isinstance(value, list) and all(isinstance(s, list) and len(s) == 2 for s in value):
        return ControlSchedule(tuple((float(t), float(e)) for t, e in value))
    raise ScenarioError("simulation.effort must be a number or a list of [t_start, effort] pairs")


def parse_scenario(text: str, default_name: str = "scenario") -> Scenario:
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ScenarioError(f"invalid TOML: {exc}") from None
    _check_keys(doc, _TOP_KEYS, "top level")

    bio_t = _table(doc, "bio")
    econ_t = _table(doc, "econ")
    diff_t = _table(doc, "diffusion")
    sim_t = _table(doc, "simulation", required=False)
    _check_keys(bio_t, _BIO_KEYS, "[bio]")
    _check_keys(econ_t, _ECON_KEYS, "[econ]")
    _check_keys(diff_t, _DIFF_KEYS, "[diffusion]")

    try:
        variant = ModelVariant.parse(str(doc.get("variant", "patches_reserve")))
        bio = BioParams(
            r1=_number(bio_t, "r1", "bio"),
            r2=_number(bio_t, "r2", "bio"),
            alpha=_number(bio_t, "alpha", "bio"),
            r=_number(bio_t, "r", "bio") if "r" in bio_t else None,
        )
        if not variant.is_patches and bio.r is None:
            raise ScenarioError(f"bio.r is required for variant {variant.value}")
        econ = EconParams(
            p=_number(econ_t, "p", "econ"),
            q=_number(econ_t, "q", "econ"),
            c=_number(econ_t, "c", "econ"),
            delta=_number(econ_t, "delta", "econ"),
            e_max=_number(econ_t, "e_max", "econ", default=1.0),
        )
        mode = diff_t.get("mode")
        if mode == "constant":
            _check_keys(diff_t, {"mode", "lambda"}, "[diffusion] (constant)")
            diffusion = DiffusionSpec.constant(_number(diff_t, "lambda", "diffusion"))
        elif mode == "size_dependent":
            _check_keys(diff_t, {"mode", "lambda0"}, "[diffusion] (size_dependent)")
            diffusion = DiffusionSpec.size_dependent(_number(diff_t, "lambda0", "diffusion"))
        else:
            raise ScenarioError(f"diffusion.mode must be 'constant' or 'size_dependent', got {mode!r}")

        simulation = None
        if sim_t is not None:
            _check_keys(sim_t, _SIM_KEYS, "[simulation]")
            simulation = SimulationSettings(
                x1_0=_number(sim_t, "x1_0", "simulation"),
                x2_0=_number(sim_t, "x2_0", "simulation"),
                horizon=_number(sim_t, "horizon", "simulation"),
                step=_number(sim_t, "step", "simulation", default=0.01),
                schedule=_schedule(sim_t.get("effort", 0.0)),
            )
            simulation.schedule.validate(econ.e_max)
            if simulation.step <= 0 or simulation.horizon < simulation.step:
                raise ScenarioError("simulation needs step > 0 and horizon >= step")
        return Scenario(
            name=str(doc.get("name", default_name)),
            variant=variant,
            bio=bio,
            econ=econ,
            diffusion=diffusion,
            simulation=simulation,
            description=str(doc.get("description", "")),
        )
    except ScenarioError:
        raise
    except DomainError as exc:
        raise ScenarioError(f"invariant violated: {exc}") from None


def scenario_to_dict(s: Scenario) -> dict[str, Any]:
    doc: dict[str, Any] = {"name": s.name, "variant": s.variant.value}
    if s.description:
        doc["description"] = s.description
    bio = {"r1": s.bio.r1, "r2": s.bio.r2, "alpha": s.bio.alpha}
    if s.bio.r is not None:
        bio["r"] = s.bio.r
    doc["bio"] = bio
    doc["econ"] = {"p": s.econ.p, "q": s.econ.q, "c": s.econ.c, "delta": s.econ.delta, "e_max": s.econ.e_max}
    key = "lambda" if s.diffusion.mode == "constant" else "lambda0"
    doc["diffusion"] = {"mode": s.diffusion.mode, key: s.diffusion.value}
    if s.simulation is not None:
        sim = s.simulation
        segs = sim.schedule.segments
        effort: Any = segs[0][1] if len(segs) == 1 else [[t, e] for t, e in segs]
        doc["simulation"] = {"x1_0": sim.x1_0, "x2_0": sim.x2_0, "horizon": sim.horizon, "step": sim.step, "effort": effort}
    return doc


def scenario_to_toml(s: Scenario) -> str:
    return tomli_w.dumps(scenario_to_dict(s))


def scenario_digest(s: Scenario) -> str:
    """SHA-256 of the canonical TOML serialization, description excluded."""
    doc = scenario_to_dict(s)
    doc.pop("description", None)
    return hashlib.sha256(tomli_w.dumps(doc).encode()).hexdigest()


@dataclass
class RunRecord:
    scenario_digest: str
    equilibrium: dict[str, Any]
    diagnostics: dict[str, Any]
    trajectory_summary: dict[str, Any] | None = None
    deviations: list[dict[str, Any]] = field(default_factory=list)
    tool_version: str = __version__

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj):
        return dataclasses.asdict(obj)
    if hasattr(obj, "item"):
        return obj.item()
    if isinstance(obj, ModelVariant):
        return obj.value
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")
