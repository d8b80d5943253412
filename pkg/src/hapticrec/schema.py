"""Taxonomy schema: the attribute catalog describing a haptic device.

Attributes fall into three groups (machine, usage, context) and carry a
typed value kind. The default schema below is the catalog used by the
shipped fixture corpus, the extraction pattern tables, and the query
planner; tests pin its group counts (41 machine, 18 usage, 12 context).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import QueryError, SchemaValidationError


class Group(str, Enum):
    MACHINE = "machine"
    USAGE = "usage"
    CONTEXT = "context"


class ValueKind(str, Enum):
    BOOLEAN = "boolean"
    NUMBER = "number"
    ENUM = "enum"
    FREE_TEXT = "free_text"


class Op(str, Enum):
    """Predicate operators for structured queries."""

    EQ = "eq"
    NE = "ne"
    LT = "lt"
    LE = "lte"
    GT = "gt"
    GE = "gte"
    CONTAINS = "contains"

    @property
    def symbol(self) -> str:
        return _OP_SYMBOLS[self]


_OP_SYMBOLS = {
    Op.EQ: "=",
    Op.NE: "!=",
    Op.LT: "<",
    Op.LE: "<=",
    Op.GT: ">",
    Op.GE: ">=",
    Op.CONTAINS: "contains",
}

# Operators legal per value kind. Ordering comparisons only make sense for
# numbers; substring matching only for free text.
_COMPATIBLE_OPS = {
    ValueKind.BOOLEAN: {Op.EQ, Op.NE},
    ValueKind.NUMBER: {Op.EQ, Op.NE, Op.LT, Op.LE, Op.GT, Op.GE},
    ValueKind.ENUM: {Op.EQ, Op.NE},
    ValueKind.FREE_TEXT: {Op.EQ, Op.NE, Op.CONTAINS},
}

_TRUE_WORDS = {"true", "yes", "1", "y"}
_FALSE_WORDS = {"false", "no", "0", "n"}


@dataclass(frozen=True)
class AttributeDef:
    """One taxonomy attribute: name, group, and value typing."""

    name: str
    group: Group
    value_kind: ValueKind
    unit: str | None = None  # required for NUMBER ("1" = dimensionless)
    allowed: tuple[str, ...] = ()  # required for ENUM, >= 2 values

    def __post_init__(self) -> None:
        if self.value_kind is ValueKind.NUMBER and not self.unit:
            raise SchemaValidationError(
                f"number attribute {self.name!r} needs a unit"
            )
        if self.value_kind is ValueKind.ENUM and len(self.allowed) < 2:
            raise SchemaValidationError(
                f"enum attribute {self.name!r} needs >= 2 allowed values"
            )


@dataclass(frozen=True)
class Predicate:
    """(attribute, operator, literal) filter over stored taxonomy values."""

    attribute: str
    op: Op
    value: object

    def describe(self) -> str:
        return f"{self.attribute} {self.op.symbol} {self.value}"


class TaxonomySchema:
    """Ordered attribute catalog with unique names."""

    def __init__(self, attributes: list[AttributeDef], version: int = 1):
        names = [a.name for a in attributes]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise SchemaValidationError(f"duplicate attribute names: {dupes}")
        self.attributes = list(attributes)
        self.version = version
        self._by_name = {a.name: a for a in attributes}

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __len__(self) -> int:
        return len(self.attributes)

    def get(self, name: str) -> AttributeDef:
        try:
            return self._by_name[name]
        except KeyError:
            raise SchemaValidationError(f"unknown attribute {name!r}") from None

    def group_counts(self) -> dict[str, int]:
        counts = {g.value: 0 for g in Group}
        for a in self.attributes:
            counts[a.group.value] += 1
        return counts

    def names(self) -> list[str]:
        return [a.name for a in self.attributes]

    # -- value handling ----------------------------------------------------

    def canonicalize(self, name: str, raw: object) -> tuple[object, str]:
        """Parse ``raw`` per the attribute's value kind.

        Returns (typed value, canonical string). The canonical string is
        the stable key used in vote tallies and JSON exports.
        """
        attr = self.get(name)
        kind = attr.value_kind
        if kind is ValueKind.BOOLEAN:
            val = _parse_bool(name, raw)
            return val, ("true" if val else "false")
        if kind is ValueKind.NUMBER:
            val = _parse_number(name, raw)
            return val, format_number(val)
        if kind is ValueKind.ENUM:
            text = str(raw).strip().lower().replace("-", "_").replace(" ", "_")
            for option in attr.allowed:
                if text == option.lower():
                    return option, option
            raise SchemaValidationError(
                f"{name}: {raw!r} not in allowed set {list(attr.allowed)}"
            )
        text = str(raw).strip()
        if not text:
            raise SchemaValidationError(f"{name}: empty free-text value")
        return text, text

    def validate_predicate(self, pred: Predicate) -> Predicate:
        """Check attribute existence and operator compatibility; returns the
        predicate with its literal canonicalized."""
        if pred.attribute not in self:
            raise QueryError(f"unknown attribute {pred.attribute!r}")
        attr = self._by_name[pred.attribute]
        if pred.op not in _COMPATIBLE_OPS[attr.value_kind]:
            raise QueryError(
                f"operator {pred.op.symbol!r} not valid for "
                f"{attr.value_kind.value} attribute {pred.attribute!r}"
            )
        if pred.op is Op.CONTAINS:
            return Predicate(pred.attribute, pred.op, str(pred.value))
        value, _ = self.canonicalize(pred.attribute, pred.value)
        return Predicate(pred.attribute, pred.op, value)

    def predicate_matches(self, pred: Predicate, stored: object) -> bool:
        """True iff a stored (already canonical) value satisfies ``pred``."""
        attr = self._by_name[pred.attribute]
        if attr.value_kind is ValueKind.NUMBER:
            s, p = float(stored), float(pred.value)  # type: ignore[arg-type]
            if pred.op is Op.EQ:
                return s == p
            if pred.op is Op.NE:
                return s != p
            if pred.op is Op.LT:
                return s < p
            if pred.op is Op.LE:
                return s <= p
            if pred.op is Op.GT:
                return s > p
            return s >= p
        if pred.op is Op.CONTAINS:
            return str(pred.value).lower() in str(stored).lower()
        if pred.op is Op.EQ:
            return stored == pred.value
        return stored != pred.value


def _parse_bool(name: str, raw: object) -> bool:
    if isinstance(raw, bool):
        return raw
    text = str(raw).strip().lower()
    if text in _TRUE_WORDS:
        return True
    if text in _FALSE_WORDS:
        return False
    raise SchemaValidationError(f"{name}: {raw!r} is not a boolean")


def _parse_number(name: str, raw: object):
    if isinstance(raw, bool):
        raise SchemaValidationError(f"{name}: {raw!r} is not a number")
    if isinstance(raw, int):
        return raw
    if isinstance(raw, float):
        return int(raw) if raw.is_integer() else raw
    try:
        value = float(str(raw).strip().replace(",", ""))
    except ValueError:
        raise SchemaValidationError(f"{name}: {raw!r} is not a number") from None
    return int(value) if value.is_integer() else value


def format_number(value) -> str:
    """Canonical text form of a numeric value: integral floats print as
    integers so tallies from '6', 6 and 6.0 merge."""
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    return str(value)


def _m(name, kind, unit=None, allowed=()):
    return AttributeDef(name, Group.MACHINE, kind, unit, tuple(allowed))


def _u(name, kind, unit=None, allowed=()):
    return AttributeDef(name, Group.USAGE, kind, unit, tuple(allowed))


def _c(name, kind, unit=None, allowed=()):
    return AttributeDef(name, Group.CONTEXT, kind, unit, tuple(allowed))


_B = ValueKind.BOOLEAN
_N = ValueKind.NUMBER
_E = ValueKind.ENUM
_T = ValueKind.FREE_TEXT

# Machine attributes: mechanics, actuation, sensing, performance envelope.
_MACHINE = [
    _m("dof", _N, "1"),
    _m("translation_dof", _N, "1"),
    _m("rotation_dof", _N, "1"),
    _m("sensed_dof", _N, "1"),
    _m("actuated_dof", _N, "1"),
    _m("grounded", _B),
    _m("kinematic_structure", _E, allowed=("serial", "parallel", "hybrid")),
    _m("base_type", _E, allowed=("desktop", "floor", "wall", "ceiling", "handheld")),
    _m("workspace_width_mm", _N, "mm"),
    _m("workspace_height_mm", _N, "mm"),
    _m("workspace_depth_mm", _N, "mm"),
    _m("workspace_volume_cm3", _N, "cm^3"),
    _m("workspace_shape", _E, allowed=("box", "sphere", "cylinder", "cone", "irregular")),
    _m("max_force_n", _N, "N"),
    _m("continuous_force_n", _N, "N"),
    _m("max_torque_nm", _N, "N*m"),
    _m("force_resolution_n", _N, "N"),
    _m("position_resolution_mm", _N, "mm"),
    _m("max_stiffness_n_per_mm", _N, "N/mm"),
    _m("backdrive_friction_n", _N, "N"),
    _m("apparent_inertia_g", _N, "g"),
    _m("mass_kg", _N, "kg"),
    _m("update_rate_hz", _N, "Hz"),
    _m(
        "actuator_type",
        _E,
        allowed=(
            "dc_motor",
            "brushless_motor",
            "voice_coil",
            "pneumatic",
            "hydraulic",
            "piezoelectric",
            "cable_drive",
            "other",
        ),
    ),
    _m("actuator_count", _N, "1"),
    _m(
        "sensor_type",
        _E,
        allowed=(
            "optical_encoder",
            "magnetic_encoder",
            "potentiometer",
            "hall_effect",
            "force_torque_sensor",
            "other",
        ),
    ),
    _m("encoder_resolution_counts", _N, "counts/rev"),
    _m(
        "transmission_type",
        _E,
        allowed=("cable", "capstan", "gear", "belt", "direct_drive", "linkage", "other"),
    ),
    _m(
        "end_effector",
        _E,
        allowed=("stylus", "thimble", "handle", "gimbal", "sphere", "plate", "custom"),
    ),
    _m("interchangeable_end_effector", _B),
    _m("gravity_compensation", _B),
    _m("backdrivable", _B),
    _m("control_paradigm", _E, allowed=("impedance", "admittance")),
    _m("bimanual_capable", _B),
    _m("peak_velocity_mm_s", _N, "mm/s"),
    _m(
        "communication_interface",
        _E,
        allowed=("usb", "ethernet", "serial", "pci", "firewire", "wireless"),
    ),
    _m("power_supply_v", _N, "V"),
    _m("safety_brake", _B),
    _m("footprint_cm2", _N, "cm^2"),
    _m("mechanism_description", _T),
    _m("materials", _T),
]

# Usage attributes: how and by whom the device is operated.
_USAGE = [
    _u(
        "body_part",
        _E,
        allowed=("finger", "hand", "wrist", "arm", "leg", "foot", "head", "torso"),
    ),
    _u("grip_style", _E, allowed=("precision", "power", "pinch", "open_hand")),
    _u("handedness", _E, allowed=("right", "left", "either")),
    _u("user_posture", _E, allowed=("seated", "standing", "either")),
    _u("portability", _E, allowed=("stationary", "portable", "wearable")),
    _u("feedback_modality", _E, allowed=("kinesthetic", "tactile", "both")),
    _u("tactile_feedback", _B),
    _u("intended_task", _T),
    _u(
        "target_user",
        _E,
        allowed=("researcher", "clinician", "consumer", "industrial", "student"),
    ),
    _u("training_required", _B),
    _u("setup_time_min", _N, "min"),
    _u("multi_user", _B),
    _u("skill_level", _E, allowed=("novice", "intermediate", "expert")),
    _u("operating_noise_db", _N, "dB"),
    _u("maintenance_interval_months", _N, "months"),
    _u("accessibility_notes", _T),
    _u("typical_session_min", _N, "min"),
    _u("safety_certified", _B),
]

# Context attributes: provenance, availability, ecosystem.
_CONTEXT = [
    _c(
        "application_domain",
        _E,
        allowed=(
            "medical",
            "rehabilitation",
            "education",
            "gaming",
            "industrial",
            "research",
            "teleoperation",
            "design",
        ),
    ),
    _c("commercially_available", _B),
    _c("price_usd", _N, "USD"),
    _c("release_year", _N, "year"),
    _c("publication_venue", _T),
    _c("open_source", _B),
    _c("software_sdk", _T),
    _c("os_support", _E, allowed=("windows", "linux", "macos", "cross_platform")),
    _c("country_of_origin", _T),
    _c(
        "deployment_setting",
        _E,
        allowed=("lab", "clinic", "home", "classroom", "factory"),
    ),
    _c("successor_of", _T),
    _c("intended_market", _E, allowed=("research", "consumer", "enterprise", "clinical")),
]


def default_schema() -> TaxonomySchema:
    """The shipped attribute catalog: 41 machine, 18 usage, 12 context."""
    return TaxonomySchema(_MACHINE + _USAGE + _CONTEXT, version=1)
