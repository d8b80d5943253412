#!/usr/bin/env python3
"""Regenerate src/hapticrec/data/fixture_corpus.json.

The fixture corpus is 20 hand-written devices with deterministic
embeddings (mock embedder over the canonical embedding text), exported
through the canonical corpus serializer so the shipped file is
byte-stable. Rerun after editing the device table or the schema.
"""

from __future__ import annotations

import sys
from pathlib import Path

SRC = Path(__file__).resolve().parents[1] / "src"
sys.path.insert(0, str(SRC))

from hapticrec.providers import MockEmbeddingProvider  # noqa: E402
from hapticrec.schema import default_schema  # noqa: E402
from hapticrec.store import (  # noqa: E402
    AttributeValue,
    CorpusStore,
    DeviceRecord,
    Metadata,
    canonical_embedding_text,
)

OUT = SRC / "hapticrec" / "data" / "fixture_corpus.json"

# name, source_kind, year, link, summary/abstract, attributes.
# Attribute values are raw; tallies default to {canon: 2.0} as if a spec
# table supported them, unless overridden in TALLIES below.
DEVICES = [
    {
        "name": "VectorPen 6",
        "source_kind": "commercial",
        "year": 2018,
        "link": "https://devices.example.com/vectorpen-6",
        "summary": (
            "The VectorPen 6 is a desktop stylus interface for design review "
            "and virtual sculpting. Six sensed and actuated axes render "
            "kinesthetic feedback at a kilohertz over USB."
        ),
        "attrs": {
            "dof": 6, "grounded": True, "base_type": "desktop",
            "end_effector": "stylus", "portability": "stationary",
            "kinematic_structure": "serial", "max_force_n": 7.9,
            "update_rate_hz": 1000, "feedback_modality": "kinesthetic",
            "communication_interface": "usb", "application_domain": "design",
            "commercially_available": True, "price_usd": 2400,
            "release_year": 2018, "body_part": "hand",
        },
    },
    {
        "name": "VectorPen 3",
        "source_kind": "commercial",
        "year": 2016,
        "link": "https://devices.example.com/vectorpen-3",
        "summary": (
            "An entry-level three-axis stylus device for classroom haptics "
            "courses. Smaller workspace and gentler forces than its six-axis "
            "sibling, at a student-friendly price."
        ),
        "attrs": {
            "dof": 3, "grounded": True, "base_type": "desktop",
            "end_effector": "stylus", "portability": "stationary",
            "kinematic_structure": "serial", "max_force_n": 3.3,
            "update_rate_hz": 1000, "feedback_modality": "kinesthetic",
            "communication_interface": "usb", "application_domain": "education",
            "commercially_available": True, "price_usd": 1800,
            "release_year": 2016, "target_user": "student",
        },
    },
    {
        "name": "OmniReach Pro",
        "source_kind": "commercial",
        "year": 2020,
        "link": "https://devices.example.com/omnireach-pro",
        "summary": (
            "A floor-standing master arm for telerobotic manipulation with a "
            "large reach and strong continuous forces. The handle accepts "
            "tool-specific grips for teleoperation work cells."
        ),
        "attrs": {
            "dof": 6, "grounded": True, "base_type": "floor",
            "end_effector": "handle", "portability": "stationary",
            "kinematic_structure": "serial", "max_force_n": 37.5,
            "continuous_force_n": 12.0, "update_rate_hz": 2000,
            "feedback_modality": "kinesthetic",
            "communication_interface": "ethernet",
            "application_domain": "teleoperation",
            "commercially_available": True, "price_usd": 21000,
            "release_year": 2020, "body_part": "arm",
        },
    },
    {
        "name": "GraviGlove X",
        "source_kind": "research_paper",
        "year": 2022,
        "link": "https://papers.example.org/graviglove-x",
        "summary": (
            "We present GraviGlove X, a wearable hand exoskeleton that "
            "renders grasp forces to four fingers without a fixed base. An "
            "open-source controller drives cable actuators from a wrist "
            "module, targeting home rehabilitation exercises."
        ),
        "attrs": {
            "dof": 4, "grounded": False, "portability": "wearable",
            "end_effector": "custom", "transmission_type": "cable",
            "max_force_n": 8.0, "feedback_modality": "both",
            "application_domain": "rehabilitation", "body_part": "hand",
            "open_source": True, "release_year": 2022,
            "target_user": "clinician", "tactile_feedback": True,
        },
    },
    {
        "name": "MicroScribe Surgical",
        "source_kind": "commercial",
        "year": 2021,
        "link": "https://devices.example.com/microscribe-surgical",
        "summary": (
            "A seven-axis stylus console for microsurgery simulation and "
            "robotic surgery training. Sub-5-micron position resolution and "
            "a 4 kHz servo loop reproduce delicate tissue contact."
        ),
        "attrs": {
            "dof": 7, "grounded": True, "base_type": "desktop",
            "end_effector": "stylus", "portability": "stationary",
            "kinematic_structure": "serial", "max_force_n": 8.8,
            "position_resolution_mm": 0.005, "update_rate_hz": 4000,
            "feedback_modality": "kinesthetic",
            "application_domain": "medical", "commercially_available": True,
            "price_usd": 34000, "release_year": 2021,
            "target_user": "clinician", "safety_brake": True,
        },
    },
    {
        "name": "TorqueDial One",
        "source_kind": "research_paper",
        "year": 2015,
        "link": "https://papers.example.org/torquedial-one",
        "summary": (
            "TorqueDial One is a single-axis rotary kinesthetic display "
            "built around a direct-drive brushless motor. We use it to "
            "teach impedance control: students feel programmable detents, "
            "springs and virtual walls through a machined aluminum knob."
        ),
        "attrs": {
            "dof": 1, "grounded": True, "base_type": "desktop",
            "end_effector": "handle", "portability": "portable",
            "actuator_type": "brushless_motor",
            "transmission_type": "direct_drive", "max_torque_nm": 2.4,
            "update_rate_hz": 10000, "application_domain": "education",
            "open_source": True, "release_year": 2015,
            "target_user": "student", "backdrivable": True,
        },
    },
    {
        "name": "PlanarGlide Duo",
        "source_kind": "research_paper",
        "year": 2017,
        "link": "https://papers.example.org/planarglide-duo",
        "summary": (
            "A planar two-degree-of-freedom manipulandum pair for bimanual "
            "reaching studies and stroke rehabilitation. Each handle glides "
            "over a 600 by 450 mm workspace and renders up to 28 N through "
            "capstan drives."
        ),
        "attrs": {
            "dof": 2, "grounded": True, "base_type": "desktop",
            "end_effector": "handle", "portability": "stationary",
            "kinematic_structure": "parallel", "max_force_n": 28.0,
            "workspace_width_mm": 600, "workspace_height_mm": 450,
            "transmission_type": "capstan", "bimanual_capable": True,
            "application_domain": "rehabilitation", "body_part": "arm",
            "release_year": 2017, "update_rate_hz": 2000,
        },
    },
    {
        "name": "HexaFloat 6F",
        "source_kind": "research_paper",
        "year": 2019,
        "link": "https://papers.example.org/hexafloat-6f",
        "summary": (
            "HexaFloat 6F suspends a gimbal grip on six voice-coil struts in "
            "a parallel configuration, yielding a backdrivable six-axis "
            "display with vanishing friction for teleoperation research."
        ),
        "attrs": {
            "dof": 6, "grounded": True, "base_type": "desktop",
            "end_effector": "gimbal", "portability": "stationary",
            "kinematic_structure": "parallel", "actuator_type": "voice_coil",
            "max_force_n": 20.0, "backdrivable": True,
            "application_domain": "teleoperation", "release_year": 2019,
            "update_rate_hz": 5000, "gravity_compensation": True,
        },
    },
    {
        "name": "FingerOrbit",
        "source_kind": "research_paper",
        "year": 2021,
        "link": "https://papers.example.org/fingerorbit",
        "summary": (
            "FingerOrbit is a delta-style parallel platform that renders "
            "kinesthetic feedback to a single fingertip through a thimble. "
            "The open-source design reaches 4.5 N peak force in a "
            "hemispherical workspace at one kilohertz."
        ),
        "attrs": {
            "dof": 3, "grounded": True, "base_type": "desktop",
            "end_effector": "thimble", "portability": "portable",
            "kinematic_structure": "parallel", "max_force_n": 4.5,
            "update_rate_hz": 1000, "feedback_modality": "kinesthetic",
            "application_domain": "research", "body_part": "finger",
            "open_source": True, "release_year": 2021,
            "workspace_shape": "sphere",
        },
    },
    {
        "name": "TeleMaster HD",
        "source_kind": "commercial",
        "year": 2023,
        "link": "https://devices.example.com/telemaster-hd",
        "summary": (
            "A heavy-duty seven-axis master console for industrial "
            "telerobotics. Dual redundant encoders, 46 N peak force and "
            "deterministic Ethernet keep remote manipulators in step with "
            "the operator."
        ),
        "attrs": {
            "dof": 7, "grounded": True, "base_type": "floor",
            "end_effector": "gimbal", "portability": "stationary",
            "kinematic_structure": "serial", "max_force_n": 46.0,
            "update_rate_hz": 2000, "communication_interface": "ethernet",
            "application_domain": "teleoperation",
            "commercially_available": True, "price_usd": 52000,
            "release_year": 2023, "target_user": "industrial",
            "safety_brake": True,
        },
    },
    {
        "name": "PocketHaptic Go",
        "source_kind": "commercial",
        "year": 2022,
        "link": "https://devices.example.com/pockethaptic-go",
        "summary": (
            "A palm-sized three-axis stylus device that folds into a "
            "carrying case, made for haptics demos and outreach. USB-powered "
            "and gentle, with forces tuned for first-time users."
        ),
        "attrs": {
            "dof": 3, "grounded": True, "base_type": "desktop",
            "end_effector": "stylus", "portability": "portable",
            "max_force_n": 2.5, "update_rate_hz": 500,
            "communication_interface": "usb",
            "application_domain": "education",
            "commercially_available": True, "price_usd": 980,
            "release_year": 2022, "mass_kg": 1.1,
        },
    },
    {
        "name": "ArmAssist Rail",
        "source_kind": "research_paper",
        "year": 2018,
        "link": "https://papers.example.org/armassist-rail",
        "summary": (
            "ArmAssist Rail mounts a powered carriage on a floor-standing "
            "linear rail to retrain reaching after stroke. The handle "
            "renders assistive or resistive forces up to 65 N along two "
            "axes while logging patient effort for therapists."
        ),
        "attrs": {
            "dof": 2, "grounded": True, "base_type": "floor",
            "end_effector": "handle", "portability": "stationary",
            "max_force_n": 65.0, "application_domain": "rehabilitation",
            "body_part": "arm", "release_year": 2018,
            "target_user": "clinician", "safety_brake": True,
            "update_rate_hz": 500,
        },
    },
    {
        "name": "StiffBoard Maker",
        "source_kind": "research_paper",
        "year": 2020,
        "link": "https://papers.example.org/stiffboard-maker",
        "summary": (
            "StiffBoard Maker is a laser-cut, open-source haptic kit for "
            "classrooms: three cable-driven axes, hobby servos and a "
            "microcontroller render simple textures and springs for under "
            "two hundred dollars in parts."
        ),
        "attrs": {
            "dof": 3, "grounded": True, "base_type": "desktop",
            "end_effector": "handle", "portability": "portable",
            "transmission_type": "cable", "max_force_n": 9.0,
            "application_domain": "education", "open_source": True,
            "release_year": 2020, "target_user": "student",
            "update_rate_hz": 500, "commercially_available": False,
        },
    },
    {
        "name": "SurgeonSense 7",
        "source_kind": "commercial",
        "year": 2019,
        "link": "https://devices.example.com/surgeonsense-7",
        "summary": (
            "A surgical-grade gimbal console with seven force-reflecting "
            "axes, fail-safe brakes and 20-micron resolution, certified for "
            "clinical simulation suites."
        ),
        "attrs": {
            "dof": 7, "grounded": True, "base_type": "desktop",
            "end_effector": "gimbal", "portability": "stationary",
            "max_force_n": 12.0, "position_resolution_mm": 0.02,
            "application_domain": "medical", "commercially_available": True,
            "price_usd": 41000, "release_year": 2019,
            "target_user": "clinician", "safety_brake": True,
            "safety_certified": True,
        },
    },
    {
        "name": "WristWave R2",
        "source_kind": "research_paper",
        "year": 2016,
        "link": "https://papers.example.org/wristwave-r2",
        "summary": (
            "WristWave R2 is a three-axis wrist rehabilitation platform "
            "rendering flexion, deviation and pronation torques up to "
            "3.8 Nm. A padded splint couples the forearm while games adapt "
            "difficulty to each patient."
        ),
        "attrs": {
            "dof": 3, "grounded": True, "base_type": "desktop",
            "end_effector": "custom", "portability": "stationary",
            "max_torque_nm": 3.8, "application_domain": "rehabilitation",
            "body_part": "wrist", "release_year": 2016,
            "target_user": "clinician", "update_rate_hz": 1000,
        },
    },
    {
        "name": "CraftForce Studio",
        "source_kind": "commercial",
        "year": 2017,
        "link": "https://devices.example.com/craftforce-studio",
        "summary": (
            "A six-axis stylus system for digital clay and CAD surfacing "
            "work. Artists carve virtual material with 10.5 N of feedback "
            "and swap nibs for knives, brushes or probes."
        ),
        "attrs": {
            "dof": 6, "grounded": True, "base_type": "desktop",
            "end_effector": "stylus", "portability": "stationary",
            "kinematic_structure": "serial", "max_force_n": 10.5,
            "interchangeable_end_effector": True,
            "application_domain": "design", "commercially_available": True,
            "price_usd": 5200, "release_year": 2017,
            "update_rate_hz": 1000, "communication_interface": "usb",
        },
    },
    {
        "name": "GamePull Vario",
        "source_kind": "commercial",
        "year": 2024,
        "link": "https://devices.example.com/gamepull-vario",
        "summary": (
            "A consumer two-axis force feedback controller for flight and "
            "fishing games. The spring-loaded handle yanks, drags and "
            "rumbles under game control over plain USB."
        ),
        "attrs": {
            "dof": 2, "grounded": True, "base_type": "desktop",
            "end_effector": "handle", "portability": "portable",
            "max_force_n": 6.0, "application_domain": "gaming",
            "commercially_available": True, "price_usd": 349,
            "release_year": 2024, "target_user": "consumer",
            "communication_interface": "usb", "update_rate_hz": 500,
            "tactile_feedback": True,
        },
    },
    {
        "name": "LoadSim Heavy",
        "source_kind": "research_paper",
        "year": 2014,
        "link": "https://papers.example.org/loadsim-heavy",
        "summary": (
            "LoadSim Heavy reproduces industrial tool loads with a "
            "hydraulic six-axis platform under admittance control. "
            "Operators practice drilling and grinding against 75 N "
            "reactive forces before touching real machinery."
        ),
        "attrs": {
            "dof": 6, "grounded": True, "base_type": "floor",
            "end_effector": "handle", "portability": "stationary",
            "actuator_type": "hydraulic", "control_paradigm": "admittance",
            "max_force_n": 75.0, "application_domain": "industrial",
            "release_year": 2014, "target_user": "industrial",
            "update_rate_hz": 1000, "mass_kg": 140,
        },
    },
    {
        "name": "EduTouch Mini",
        "source_kind": "commercial",
        "year": 2015,
        "link": "https://devices.example.com/edutouch-mini",
        "summary": (
            "A compact three-axis stylus device bundled with courseware for "
            "physics and anatomy lessons. Built to survive classrooms, "
            "priced for lab sets."
        ),
        "attrs": {
            "dof": 3, "grounded": True, "base_type": "desktop",
            "end_effector": "stylus", "portability": "stationary",
            "max_force_n": 3.5, "application_domain": "education",
            "commercially_available": True, "price_usd": 1200,
            "release_year": 2015, "target_user": "student",
            "communication_interface": "usb", "update_rate_hz": 1000,
        },
    },
    {
        "name": "DualStream S2",
        "source_kind": "commercial",
        "year": 2021,
        "link": "https://devices.example.com/dualstream-s2",
        "summary": (
            "A bimanual teleoperation console pairing two six-axis gimbal "
            "arms on a shared floor base. Designed for dual-arm robot "
            "control with synchronized clutching and 30 N per hand."
        ),
        "attrs": {
            "dof": 6, "grounded": True, "base_type": "floor",
            "end_effector": "gimbal", "portability": "stationary",
            "bimanual_capable": True, "max_force_n": 30.0,
            "application_domain": "teleoperation",
            "commercially_available": True, "price_usd": 48000,
            "release_year": 2021, "communication_interface": "ethernet",
            "update_rate_hz": 2000, "body_part": "hand",
        },
    },
]

# Non-default vote tallies: leftovers of real extraction disagreements.
TALLIES = {
    "VectorPen 6": {"dof": {"6": 3.0, "7": 0.5}},
    "OmniReach Pro": {"max_force_n": {"37.5": 2.0, "40": 1.0}},
    "GraviGlove X": {"grounded": {"false": 2.5, "true": 0.5}},
    "FingerOrbit": {"max_force_n": {"4.5": 3.0}},
}

# SurgeonSense 7's dof was fixed by a reviewer; keep that in provenance.
CORRECTED = {"SurgeonSense 7": {"dof"}}


def build() -> str:
    schema = default_schema()
    store = CorpusStore(schema)
    embedder = MockEmbeddingProvider(store.dim)
    for idx, spec in enumerate(DEVICES, start=1):
        name = spec["name"]
        overrides = TALLIES.get(name, {})
        corrected_attrs = CORRECTED.get(name, set())
        taxonomy = {}
        for attr, raw in spec["attrs"].items():
            typed, canon = schema.canonicalize(attr, raw)
            override = attr in corrected_attrs
            tally = overrides.get(attr, {canon: 1.0 if override else 2.0})
            taxonomy[attr] = AttributeValue(
                value=typed,
                vote_tally=tally,
                supporting_blocks=[] if override else [f"{spec['link']}#b1"],
                human_override=override,
            )
        record = DeviceRecord(
            id=idx,
            name=name,
            source_kind=spec["source_kind"],
            metadata=Metadata(
                title=name,
                abstract_or_summary=spec["summary"],
                publication_year=spec["year"],
            ),
            taxonomy=taxonomy,
            review_status="corrected" if corrected_attrs else "approved",
            source_links=[spec["link"]],
        )
        store.upsert_device(record)
        store.put_embedding(idx, embedder.embed(canonical_embedding_text(schema, record)))
    return store.export_json()


def main() -> None:
    text = build()
    OUT.write_text(text, encoding="utf-8")
    print(f"wrote {len(DEVICES)} devices to {OUT}")


if __name__ == "__main__":
    main()
