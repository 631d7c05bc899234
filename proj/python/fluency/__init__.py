"""Speech therapy planning core: segmentation, aggregation, plan validation,
review transitions and the mock-backed refinement loop."""

import json

from . import _core
from ._core import FluencyError, detect_red_flag, softmax_temperature

__all__ = [
    "FluencyError",
    "aggregate",
    "apply_review",
    "detect_red_flag",
    "error_code",
    "parse_plan_output",
    "plan_windows",
    "render_therapy_prompt",
    "run_mock_loop",
    "softmax_temperature",
    "validate_plan",
]


def error_code(exc):
    """The ErrorCode name carried by a FluencyError ("BadConfig", ...)."""
    return str(exc).split(":", 1)[0]


def plan_windows(clip_s, duration_s=4, overlap_pct=50):
    windows, hop, padded = _core.plan_windows(clip_s, duration_s, overlap_pct)
    return {"windows": [tuple(w) for w in windows], "hop_s": hop, "padded": padded}


def aggregate(analyses, mild_max_pct=10.0, moderate_max_pct=25.0):
    return json.loads(_core.aggregate(json.dumps(analyses), mild_max_pct, moderate_max_pct))


def validate_plan(plan):
    return json.loads(_core.validate_plan(json.dumps(plan)))


def parse_plan_output(raw):
    return json.loads(_core.parse_plan_output(raw))


def apply_review(state, action, feedback="", clinician_id="", plan_valid=True):
    return json.loads(
        _core.apply_review(json.dumps(state), action, feedback, clinician_id, plan_valid)
    )


def render_therapy_prompt(context):
    return _core.render_therapy_prompt(json.dumps(context))


def run_mock_loop(context, rounds=2, seed=0):
    return json.loads(_core.run_mock_loop(json.dumps(context), rounds, seed))
