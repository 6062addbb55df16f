"""Contact-aware robot-to-human handover planning."""

import json

from ._core import (
    HandoverError,
    Scene,
    VoxelGrid,
    cli,
    contact_score,
    load_scene,
    load_vgrid,
    lower_median,
    make_suite_scene,
    orientation_sample_count,
    plan_handover_position,
    save_scene,
    save_vgrid,
    success,
    suite_object_names,
    voxelize_obj,
)
from . import _core

MODES = ("FULL", "A1", "A2", "A3", "A4")


def run_pipeline(scene, mode="FULL", seed=0):
    """Run one handover and return the report as a dict."""
    return json.loads(_core.run_pipeline_json(scene, mode, seed))


def aggregate(reports):
    """Aggregate report dicts; returns (summary_csv_text, summary_dict)."""
    csv, summary = _core.aggregate_json([json.dumps(r) for r in reports])
    return csv, json.loads(summary)


__all__ = [
    "HandoverError",
    "MODES",
    "Scene",
    "VoxelGrid",
    "aggregate",
    "cli",
    "contact_score",
    "load_scene",
    "load_vgrid",
    "lower_median",
    "make_suite_scene",
    "orientation_sample_count",
    "plan_handover_position",
    "run_pipeline",
    "save_scene",
    "save_vgrid",
    "success",
    "suite_object_names",
    "voxelize_obj",
]
