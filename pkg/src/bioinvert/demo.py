"""The shipped demo project: underwater soft-robot propulsion strategies.

Runs the whole workflow (ingest, classify, review, frame, invert, screen,
rank, cluster) on the three-document demo corpus with the mock completion
backend, entirely offline and reproducible for a fixed seed.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from . import project as proj


def demo_corpus() -> list[dict]:
    docs = []
    for name in ("squid", "inchworm", "fish"):
        text = resources.files("bioinvert.fixtures").joinpath(f"demo-corpus/{name}.txt").read_text("utf-8")
        docs.append({"doc_id": name, "text": text})
    return docs


def demo_kb_doc() -> dict:
    raw = resources.files("bioinvert.fixtures").joinpath("kb-soft-robot.json").read_text("utf-8")
    return json.loads(raw)


def demo_problem_doc() -> dict:
    return {
        "level": "System",
        "requirement_elements": [
            "provide underwater thrust by fluid ejection",
            "achieve stable crawling on the seafloor",
        ],
        "processing_elements": [
            "pressure regulation subsystem",
            "soft actuator drive modules",
        ],
        "description": "pressure-driven underwater soft robot",
    }


def demo_judgment_doc() -> dict:
    return {
        "order": [
            "functional_compliance",
            "behavioral_alignment",
            "characteristic_consistency",
            "environmental_migration",
            "reliability",
            "economic_tolerance",
        ],
        "ratios": [1.2, 1.0, 1.4, 1.0, 1.2],
    }


def demo_manual_scores() -> dict:
    return {
        "frame:squid": {"reliability": 0.7, "economic_tolerance": 0.9},
        "frame:inchworm": {"reliability": 0.9, "economic_tolerance": 0.5},
        "frame:fish": {"reliability": 0.8, "economic_tolerance": 0.6},
    }


def run_demo_workflow(root: str | Path, project_id: str = "demo", seed: int = 42) -> proj.Project:
    """Create and drive the demo project end to end; returns the project.

    Uses the mock completion backend throughout, so two runs with the same
    seed produce byte-identical exports.
    """
    project = proj.Project(id=project_id, name="underwater soft robot demo")
    proj.record(project, "set_problem", demo_problem_doc())
    proj.record(project, "set_kb", {"kb": demo_kb_doc()})
    proj.record(project, "run_stage", {"stage": "Ingested", "docs": demo_corpus(), "seed": seed})
    proj.record(
        project, "run_stage", {"stage": "Classified", "backend": "mock", "threshold": 0.5, "seed": seed}
    )
    proj.record(project, "run_stage", {"stage": "Reviewed", "seed": seed})
    for batch in project.batches:
        proj.record(
            project,
            "verdicts",
            {"batch_no": batch.batch_no, "verdicts": {i: "Pass" for i in batch.audit_sample}},
        )
    proj.record(project, "run_stage", {"stage": "Framed", "seed": seed})
    proj.record(project, "run_stage", {"stage": "Inverted", "backend": "mock", "seed": seed})
    keep_all = {r.id: {"decision": "Keep"} for r in project.inversions}
    proj.record(project, "run_stage", {"stage": "Screened", "verdicts": keep_all, "seed": seed})
    proj.record(project, "g1_judgment", demo_judgment_doc())
    proj.record(
        project,
        "run_stage",
        {
            "stage": "Ranked",
            "manual_scores": demo_manual_scores(),
            "v": 0.5,
            "target_env": {"head": "water", "attributives": ["open"]},
            "seed": seed,
        },
    )
    proj.record(
        project, "run_stage", {"stage": "Clustered", "k": len(project.inversions), "threshold": 0.5, "seed": seed}
    )
    proj.persist(project, root)
    return project
