"""Resistance, Joule power, current density, and heat-sinking budgets."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInput
from .geometry import COPPER, GeometrySpec, Material, conductor_sections


def conductor_resistance(length: float, area: float, material: Material) -> float:
    """R = resistivity * length / area (ohm)."""
    if length <= 0 or area <= 0:
        raise InvalidInput("length and area must be positive")
    return material.resistivity * length / area


def joule_power(current: float, resistance: float) -> float:
    """P = I^2 R (watt)."""
    if resistance < 0:
        raise InvalidInput("resistance must be non-negative")
    return current * current * resistance


def current_density(current: float, area: float) -> float:
    """Current density in A/mm^2 for a conductor of cross-section `area` m^2."""
    if area <= 0:
        raise InvalidInput("area must be positive")
    return current / (area * 1.0e6)


def required_heat_transfer_coefficient(power: float, contact_area: float,
                                       delta_t: float) -> float:
    """W/m^2K needed to sink `power` through `contact_area` at `delta_t`."""
    if contact_area <= 0 or delta_t <= 0:
        raise InvalidInput("contact area and temperature budget must be positive")
    return power / (contact_area * delta_t)


@dataclass(frozen=True)
class ConductorBudget:
    group_id: str
    length: float            # m, total path length
    cross_section: float     # m^2, narrowest declared section
    resistance: float        # ohm, summed over sections
    current: float           # A
    power: float             # W
    current_density: float   # A/mm^2 at the narrowest section


@dataclass(frozen=True)
class PowerReport:
    material: Material
    conductors: tuple        # of ConductorBudget
    total_power: float       # W

    def to_json_dict(self) -> dict:
        return {
            "material": {"name": self.material.name,
                         "resistivity_ohm_m": self.material.resistivity},
            "conductors": [
                {"group": c.group_id, "length_m": c.length,
                 "cross_section_mm2": c.cross_section * 1e6,
                 "resistance_ohm": c.resistance, "current_A": c.current,
                 "power_W": c.power,
                 "current_density_A_mm2": c.current_density}
                for c in self.conductors
            ],
            "total_power_W": self.total_power,
        }


def power_report(spec: GeometrySpec, material: Material = COPPER) -> PowerReport:
    """Joule budget from the declared solid cross-sections of a geometry.

    The geometric factor sum(length/area) is accumulated per conductor and
    multiplied by the resistivity once, so that power scales exactly with the
    material's resistivity ratio.
    """
    by_group: dict = {}
    for sec in conductor_sections(spec):
        entry = by_group.setdefault(sec.group_id,
                                    {"length": 0.0, "geom": 0.0,
                                     "min_area": float("inf"),
                                     "current": sec.current})
        entry["length"] += sec.length
        entry["geom"] += sec.length / sec.area
        entry["min_area"] = min(entry["min_area"], sec.area)
    conductors = []
    total = 0.0
    for gid, e in by_group.items():
        e["resistance"] = material.resistivity * e["geom"]
        p = joule_power(e["current"], e["resistance"])
        total += p
        conductors.append(ConductorBudget(
            group_id=gid, length=e["length"], cross_section=e["min_area"],
            resistance=e["resistance"], current=e["current"], power=p,
            current_density=current_density(e["current"], e["min_area"])))
    return PowerReport(material=material, conductors=tuple(conductors),
                       total_power=total)
