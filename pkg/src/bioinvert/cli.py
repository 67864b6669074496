"""Command-line adapter; every subcommand is a thin wrapper over the
project library, so CLI and HTTP behavior stay identical.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import project as proj
from .errors import BioinvertError

DEFAULT_SEED = 0


def _echo(report) -> None:
    click.echo(json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False))


def _split_project_dir(project_dir: str) -> tuple[Path, str]:
    path = Path(project_dir).resolve()
    return path.parent, path.name


class _Ctx:
    def __init__(self, project_dir: str, seed: int, backend: str, trace_llm: bool = False):
        self.root, self.pid = _split_project_dir(project_dir)
        self.seed = seed
        self.backend = backend
        self.trace_llm = trace_llm

    def load(self) -> proj.Project:
        return proj.load(self.root, self.pid)

    def config(self) -> dict:
        config = proj.read_config(self.root, self.pid)
        if self.trace_llm:
            config["trace_path"] = str(self.root / self.pid / "llm-trace.jsonl")
        return config

    def backend_params(self) -> dict:
        # Only backends that reach out need the config embedded in the event.
        if self.backend == "llm" or self.trace_llm:
            return {"config": self.config()}
        return {}

    def mutate(self, op: str, params: dict) -> dict:
        with proj.project_lock(self.root, self.pid):
            project = self.load()
            report = proj.record(project, op, params)
            proj.persist(project, self.root)
        return report

    def run_stage(self, stage: proj.Stage, params: dict) -> dict:
        params = dict(params)
        params["stage"] = stage.value
        return self.mutate("run_stage", params)


@click.group()
@click.option("--project", "project_dir", default="./project", show_default=True, help="Project directory.")
@click.option("--seed", default=DEFAULT_SEED, show_default=True, type=int, help="Seed for randomized steps.")
@click.option(
    "--backend",
    default="lexicon",
    show_default=True,
    type=click.Choice(["lexicon", "llm", "mock"]),
    help="Classifier / corrector backend.",
)
@click.option("--trace-llm", is_flag=True, help="Log redacted LLM request/response bodies into the project directory.")
@click.pass_context
def main(ctx, project_dir, seed, backend, trace_llm):
    """Strategy-inversion workbench: text to frames to ranked engineering strategies."""
    ctx.obj = _Ctx(project_dir, seed, backend, trace_llm)


@main.command()
@click.option("--name", default="", help="Project display name.")
@click.pass_obj
def new(ctx: _Ctx, name):
    """Create an empty project directory."""
    if (ctx.root / ctx.pid / "project.json").exists():
        raise click.ClickException(f"project already exists: {ctx.root / ctx.pid}")
    project = proj.Project(id=ctx.pid, name=name or ctx.pid)
    proj.persist(project, ctx.root)
    _echo({"created": str(ctx.root / ctx.pid)})


@main.command()
@click.argument("files", nargs=-1, required=True, type=click.Path(exists=True))
@click.pass_obj
def ingest(ctx: _Ctx, files):
    """Ingest plain-text documents or JSONL records {"doc_id", "text"}."""
    docs = []
    for name in files:
        path = Path(name)
        if path.suffix == ".jsonl":
            for line in path.read_text("utf-8").splitlines():
                if line.strip():
                    record = json.loads(line)
                    docs.append({"doc_id": record["doc_id"], "text": record["text"]})
        else:
            docs.append({"doc_id": path.stem, "text": path.read_text("utf-8")})
    _echo(ctx.run_stage(proj.Stage.INGESTED, {"docs": docs, "seed": ctx.seed}))


@main.command("set-problem")
@click.option("--level", type=click.Choice(["System", "Subsystem", "Component"]), required=True)
@click.option("--requirement", "requirements", multiple=True, required=True)
@click.option("--processing", "processings", multiple=True)
@click.option("--description", default="")
@click.pass_obj
def set_problem(ctx: _Ctx, level, requirements, processings, description):
    """Record the design problem (level plus requirement/processing elements)."""
    _echo(
        ctx.mutate(
            "set_problem",
            {
                "level": level,
                "requirement_elements": list(requirements),
                "processing_elements": list(processings),
                "description": description,
            },
        )
    )


@main.command("set-kb")
@click.argument("kb_file", type=click.Path(exists=True))
@click.pass_obj
def set_kb(ctx: _Ctx, kb_file):
    """Load the engineering knowledge base from a JSON file."""
    _echo(ctx.mutate("set_kb", {"kb": json.loads(Path(kb_file).read_text("utf-8"))}))


@main.command()
@click.option("--threshold", default=None, type=float, help="Label threshold; config.json's value when omitted.")
@click.pass_obj
def classify(ctx: _Ctx, threshold):
    """Label every sentence on the four dimensions."""
    if threshold is None:
        threshold = ctx.config()["threshold"]
    params = {"backend": ctx.backend, "threshold": threshold, "seed": ctx.seed}
    params.update(ctx.backend_params())
    _echo(ctx.run_stage(proj.Stage.CLASSIFIED, params))


@main.command()
@click.option("--target", required=True, type=int, help="Total sample count.")
@click.option("--ratio", default=None, type=float, help="Real-sample fraction; config.json's value when omitted.")
@click.pass_obj
def samples(ctx: _Ctx, target, ratio):
    """Generate a training sample set (real + paraphrased)."""
    if ratio is None:
        ratio = ctx.config()["ratio_real"]
    _echo(ctx.mutate("samples", {"target_size": target, "ratio_real": ratio, "seed": ctx.seed}))


@main.group()
def review():
    """Batch review: build batches, record verdicts, iterate."""


@review.command("batches")
@click.pass_obj
def review_batches(ctx: _Ctx):
    """Build review batches of 100 with 3% audit samples."""
    _echo(ctx.run_stage(proj.Stage.REVIEWED, {"seed": ctx.seed}))


@review.command("verdict")
@click.argument("batch_no", type=int)
@click.option("--item", "items", multiple=True, help="item_id=Pass|Fail")
@click.option("--all-pass", is_flag=True, help="Mark every audited item in the batch Pass.")
@click.pass_obj
def review_verdict(ctx: _Ctx, batch_no, items, all_pass):
    """Record reviewer verdicts for one batch's audit sample."""
    verdicts = {}
    for entry in items:
        item_id, _, verdict = entry.rpartition("=")
        verdicts[item_id] = verdict
    if all_pass:
        project = ctx.load()
        batch = proj._find_batch(project, batch_no)
        for item_id in batch.audit_sample:
            verdicts.setdefault(item_id, "Pass")
    if not verdicts:
        raise click.ClickException("no verdicts given; use --item or --all-pass")
    _echo(ctx.mutate("verdicts", {"batch_no": batch_no, "verdicts": verdicts}))


@review.command("step")
@click.pass_obj
def review_step(ctx: _Ctx):
    """Relabel Dirty batches and re-audit them."""
    _echo(ctx.mutate("review_step", {"backend": ctx.backend, "seed": ctx.seed}))


@main.command()
@click.pass_obj
def frame(ctx: _Ctx):
    """Build one knowledge frame per document from the labeled sentences."""
    _echo(ctx.run_stage(proj.Stage.FRAMED, {"seed": ctx.seed}))


@main.command()
@click.pass_obj
def invert(ctx: _Ctx):
    """Substitute engineering vocabulary and apply logical correction."""
    backend = ctx.backend if ctx.backend != "lexicon" else "mock"
    params = {"backend": backend, "seed": ctx.seed}
    params.update(ctx.backend_params())
    _echo(ctx.run_stage(proj.Stage.INVERTED, params))


@main.command()
@click.option("--keep", "keeps", multiple=True, help="Result id to keep.")
@click.option("--drop", "drops", multiple=True, help="result_id=reason to drop.")
@click.option("--keep-all", is_flag=True)
@click.pass_obj
def screen(ctx: _Ctx, keeps, drops, keep_all):
    """Apply designer screening verdicts to the inversion results."""
    verdicts = {}
    if keep_all:
        project = ctx.load()
        for result in project.inversions:
            verdicts[result.id] = {"decision": "Keep"}
    for rid in keeps:
        verdicts[rid] = {"decision": "Keep"}
    for entry in drops:
        rid, _, reason = entry.partition("=")
        verdicts[rid] = {"decision": "Drop", "reason": reason}
    _echo(ctx.run_stage(proj.Stage.SCREENED, {"verdicts": verdicts, "seed": ctx.seed}))


@main.command()
@click.option("--judgment-file", type=click.Path(exists=True), help='JSON {"order": [...], "ratios": [...]}.')
@click.option("--manual-file", type=click.Path(exists=True), required=True,
              help='JSON {alt_id: {"reliability": x, "economic_tolerance": y}}.')
@click.option("--v", default=0.5, show_default=True, type=float)
@click.option("--target-env", default=None, help='Target environment phrase, e.g. "open water".')
@click.pass_obj
def rank(ctx: _Ctx, judgment_file, manual_file, v, target_env):
    """Rank the kept strategies with G1 weights and VIKOR."""
    params = {
        "manual_scores": json.loads(Path(manual_file).read_text("utf-8")),
        "v": v,
        "seed": ctx.seed,
    }
    if target_env:
        from .frames import split_noun_phrase

        head, attrs = split_noun_phrase(target_env)
        params["target_env"] = {"head": head, "attributives": list(attrs)}
    if judgment_file:
        params["judgment"] = json.loads(Path(judgment_file).read_text("utf-8"))
    _echo(ctx.run_stage(proj.Stage.RANKED, params))


@main.command()
@click.option("--k", required=True, type=int)
@click.option("--threshold", default=0.5, show_default=True, type=float)
@click.pass_obj
def cluster(ctx: _Ctx, k, threshold):
    """Cluster the top-k ranked strategies into composite candidates."""
    _echo(ctx.run_stage(proj.Stage.CLUSTERED, {"k": k, "threshold": threshold, "seed": ctx.seed}))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=None, type=int, help="Port; config.json's value when omitted.")
@click.option("--static-dir", type=click.Path(), default=None, help="Built designer-UI bundle to serve.")
@click.pass_obj
def serve(ctx: _Ctx, host, port, static_dir):
    """Run the workbench HTTP service over the project root."""
    from .api import serve as serve_app

    if port is None:
        port = ctx.config()["port"]
    serve_app(ctx.root, host=host, port=port, static_dir=static_dir)


@main.command()
@click.option("--output", "-o", type=click.Path(), default=None)
@click.option("--labeled", type=click.Path(), default=None,
              help="Also write the labeled sentences as line-delimited records.")
@click.pass_obj
def export(ctx: _Ctx, output, labeled):
    """Write the full project bundle (canonical JSON) to a file or stdout."""
    from .corpus import write_labeled_jsonl

    project = ctx.load()
    if labeled:
        Path(labeled).write_text(write_labeled_jsonl(project.labeled), encoding="utf-8")
    data = proj.export_bytes(project)
    if output:
        Path(output).write_bytes(data)
        _echo({"written": output, "bytes": len(data), "labeled": labeled})
    else:
        sys.stdout.write(data.decode("utf-8"))


def run() -> None:  # console entry point with error envelope
    try:
        main(standalone_mode=True)
    except BioinvertError as exc:
        click.echo(json.dumps(exc.to_dict(), sort_keys=True), err=True)
        sys.exit(1)


if __name__ == "__main__":
    run()
