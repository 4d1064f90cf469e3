"""Machine-readable verdicts. Key order is part of the format."""

from __future__ import annotations

import json
from typing import Optional

from .breach import UnsafeTrace, Verdict


def trace_report(status: str, iterations: int, trace: Optional[UnsafeTrace] = None) -> dict:
    out: dict = {"status": status, "iterations": iterations, "trace": [], "formula": None, "witness": None}
    if trace is not None:
        out["trace"] = [{"step": i, "transition": name} for i, name in enumerate(trace.transitions)]
        out["formula"] = str(trace.formula)
        if trace.witness is not None:
            w = trace.witness.interpretation.to_json()
            w["assignments"] = [
                {
                    "step": s.step,
                    "transition": s.transition,
                    "values": dict(s.values),
                    "params": dict(s.params),
                }
                for s in trace.witness.steps
            ]
            out["witness"] = w
    return out


def verdict_report(v: Verdict) -> dict:
    return trace_report(v.status, v.iterations, v.trace)


def dumps(report: dict) -> str:
    return json.dumps(report, ensure_ascii=False, indent=2) + "\n"
