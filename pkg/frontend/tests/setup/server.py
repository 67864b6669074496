"""Launches a workbench server over seeded fixture projects for UI tests.

Projects:
  demo    - the full workflow, ranked and clustered (seed 42)
  review  - stopped at the review stage, batches still Open (seed 7)
  editing - like demo, for frame-editor mutations (seed 42)
"""

import sys
import tempfile

import uvicorn

from bioinvert import project as proj
from bioinvert.api import create_app
from bioinvert.demo import demo_corpus, demo_kb_doc, demo_problem_doc, run_demo_workflow


def seed_review_project(root: str, pid: str) -> None:
    project = proj.Project(id=pid, name="review fixture")
    proj.record(project, "set_problem", demo_problem_doc())
    proj.record(project, "set_kb", {"kb": demo_kb_doc()})
    proj.record(project, "run_stage", {"stage": "Ingested", "docs": demo_corpus(), "seed": 7})
    proj.record(
        project, "run_stage", {"stage": "Classified", "backend": "lexicon", "threshold": 0.5, "seed": 7}
    )
    proj.record(project, "run_stage", {"stage": "Reviewed", "seed": 7})
    proj.persist(project, root)


def main() -> None:
    port = int(sys.argv[1]) if len(sys.argv) > 1 else 8231
    root = tempfile.mkdtemp(prefix="bioinvert-ui-tests-")
    run_demo_workflow(root, "demo", seed=42)
    run_demo_workflow(root, "editing", seed=42)
    seed_review_project(root, "review")
    uvicorn.run(create_app(root), host="127.0.0.1", port=port, log_level="warning")


if __name__ == "__main__":
    main()
