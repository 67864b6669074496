"""Project state, the staged workflow, and event-sourced persistence.

Every mutation is an event (op + params + seed, no wall-clock time), and
project state is a pure fold over the event log given deterministic
backends, so replaying the log from an empty project reproduces the
persisted state byte for byte. Artifacts of downstream stages are never
deleted by an upstream re-run; they are marked stale.
"""

from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from filelock import FileLock

from . import corpus as corpus_mod
from . import decision as decision_mod
from . import frames as frames_mod
from . import inversion as inversion_mod
from . import llm as llm_mod
from .corpus import (
    BatchStatus,
    LabeledSentence,
    ReviewBatch,
    SentenceRecord,
    Verdict,
    labeled_from_record,
    labeled_to_record,
)
from .errors import (
    BioinvertError,
    IoError,
    SchemaError,
    StageOrderViolationError,
    VersionMismatchError,
)
from .frames import (
    Dimension,
    DesignProblem,
    EnvironmentDesc,
    Level,
    StrategyFrame,
    parse_frame,
    serialize_frame,
)
from .inversion import (
    EngineeringKB,
    InversionResult,
    ScreenDecision,
    ScreenVerdict,
    Substitution,
    load_kb,
    screen,
)
from .lexicon import LexiconClassifier

PROJECT_VERSION = 1


class Stage(enum.Enum):
    INGESTED = "Ingested"
    CLASSIFIED = "Classified"
    REVIEWED = "Reviewed"
    FRAMED = "Framed"
    INVERTED = "Inverted"
    SCREENED = "Screened"
    RANKED = "Ranked"
    CLUSTERED = "Clustered"


STAGE_ORDER = tuple(Stage)


@dataclass
class StageRecord:
    complete: bool = False
    stale: bool = False
    params: dict = field(default_factory=dict)
    seed: int | None = None

    def to_dict(self) -> dict:
        return {"complete": self.complete, "stale": self.stale, "params": self.params, "seed": self.seed}


@dataclass
class Project:
    id: str
    name: str = ""
    docs: dict[str, str] = field(default_factory=dict)
    sentences: list[SentenceRecord] = field(default_factory=list)
    labeled: list[LabeledSentence] = field(default_factory=list)
    batches: list[ReviewBatch] = field(default_factory=list)
    samples_doc: dict | None = None
    frames: dict[str, StrategyFrame] = field(default_factory=dict)
    inversions: list[InversionResult] = field(default_factory=list)
    screening: dict[str, ScreenVerdict] = field(default_factory=dict)
    decision_doc: dict | None = None
    cluster_doc: dict | None = None
    cluster_notes: dict[str, str] = field(default_factory=dict)
    problem: DesignProblem | None = None
    kb_doc: dict | None = None
    judgment_doc: dict | None = None
    stages: dict[Stage, StageRecord] = field(default_factory=lambda: {s: StageRecord() for s in STAGE_ORDER})
    events: list[dict] = field(default_factory=list)

    # -- derived views -------------------------------------------------

    def kb(self) -> EngineeringKB:
        if not self.kb_doc:
            raise BioinvertError("project has no knowledge base; run set-kb first")
        return load_kb(self.kb_doc)

    def kept_results(self) -> list[InversionResult]:
        kept, _ = screen(self.inversions, self.screening)
        return kept

    def workflow_state(self) -> dict:
        return {
            stage.value: self.stages[stage].to_dict() for stage in STAGE_ORDER
        }


# ---------------------------------------------------------------------------
# Event application
# ---------------------------------------------------------------------------


def _make_classifier(backend: str, config: dict | None = None):
    config = config or {}
    if backend == "lexicon":
        return LexiconClassifier()
    if backend == "mock":
        return llm_mod.LlmClassifier(llm_mod.MockLlmClient())
    if backend == "llm":
        client = llm_mod.HttpLlmClient(
            base_url=config.get("llm_base_url", "http://localhost:8080/v1"),
            model=config.get("llm_model", "default"),
            trace_path=config.get("trace_path"),
        )
        return llm_mod.LlmClassifier(client)
    raise ValueError(f"unknown backend {backend!r}")


def _make_corrector(backend: str | None, config: dict | None = None):
    config = config or {}
    if backend in (None, "none"):
        return None
    if backend == "mock":
        return llm_mod.MockLlmClient()
    if backend == "llm":
        return llm_mod.HttpLlmClient(
            base_url=config.get("llm_base_url", "http://localhost:8080/v1"),
            model=config.get("llm_model", "default"),
            trace_path=config.get("trace_path"),
        )
    raise ValueError(f"unknown backend {backend!r}")


def _require_prior(project: Project, stage: Stage, force: bool) -> None:
    idx = STAGE_ORDER.index(stage)
    if idx == 0:
        return
    prior = STAGE_ORDER[idx - 1]
    record = project.stages[prior]
    if force:
        return
    if not record.complete or record.stale:
        raise StageOrderViolationError(
            f"stage {stage.value} requires {prior.value} to be complete and fresh"
        )


def _mark_downstream_stale(project: Project, stage: Stage) -> None:
    idx = STAGE_ORDER.index(stage)
    for later in STAGE_ORDER[idx + 1 :]:
        record = project.stages[later]
        if record.complete:
            record.stale = True


def _env_from_doc(doc: dict | None) -> EnvironmentDesc | None:
    if doc is None:
        return None
    return EnvironmentDesc(doc["head"], tuple(doc.get("attributives", ())))


def _run_ingested(project: Project, params: dict) -> dict:
    added = []
    for entry in params["docs"]:
        doc_id, text = entry["doc_id"], entry["text"]
        project.docs[doc_id] = text
        records = corpus_mod.segment(text, doc_id)
        project.sentences = [s for s in project.sentences if s.doc_id != doc_id] + records
        added.append({"doc_id": doc_id, "sentences": len(records)})
    return {"docs": added}


def _run_classified(project: Project, params: dict) -> dict:
    classifier = _make_classifier(params.get("backend", "lexicon"), params.get("config"))
    threshold = params.get("threshold", corpus_mod.DEFAULT_THRESHOLD)
    project.labeled = [corpus_mod.classify(s, classifier, threshold) for s in project.sentences]
    return {"labeled": len(project.labeled)}


def _run_reviewed(project: Project, params: dict) -> dict:
    project.batches = corpus_mod.build_review_batches(project.labeled, params["seed"])
    return {
        "batches": len(project.batches),
        "audit_total": sum(len(b.audit_sample) for b in project.batches),
    }


def _run_framed(project: Project, params: dict) -> dict:
    summarizer = inversion_mod.RuleSummarizer()
    project.frames = {}
    skipped = []
    by_doc: dict[str, list[LabeledSentence]] = {}
    for item in project.labeled:
        by_doc.setdefault(item.sentence.doc_id, []).append(item)
    for doc_id, items in by_doc.items():
        has_f = any(Dimension.FUNCTION in i.labels for i in items)
        has_c = any(Dimension.CHARACTERISTIC in i.labels for i in items)
        if not (has_f and has_c):
            skipped.append(doc_id)
            continue
        frame = inversion_mod.build_frame(items, summarizer, frame_id=f"frame:{doc_id}")
        project.frames[frame.id] = frame
    return {"frames": sorted(project.frames), "skipped": skipped}


def _run_inverted(project: Project, params: dict) -> dict:
    kb = project.kb()
    corrector = _make_corrector(params.get("backend", "mock"), params.get("config"))
    project.inversions = [
        inversion_mod.invert(frame, kb, corrector) for frame in project.frames.values()
    ]
    return {
        "inverted": [r.id for r in project.inversions],
        "unresolved": {r.id: list(r.unresolved) for r in project.inversions},
    }


def _run_screened(project: Project, params: dict) -> dict:
    verdicts = {
        rid: ScreenVerdict(ScreenDecision(v["decision"]), v.get("reason", ""))
        for rid, v in params["verdicts"].items()
    }
    kept, dropped = screen(project.inversions, verdicts)
    project.screening = verdicts
    return {"kept": [r.id for r in kept], "dropped": [r.id for r in dropped]}


def _run_ranked(project: Project, params: dict) -> dict:
    if project.problem is None:
        raise BioinvertError("project has no design problem; run set-problem first")
    judgment_doc = params.get("judgment") or project.judgment_doc
    if judgment_doc is None:
        raise BioinvertError("no criteria judgment; post one first")
    judgment = decision_mod.G1Judgment(
        order=tuple(judgment_doc["order"]), ratios=tuple(judgment_doc["ratios"])
    )
    run = decision_mod.rank_strategies(
        kept=project.kept_results(),
        judgment=judgment,
        manual_scores=params["manual_scores"],
        problem=project.problem,
        target_env=_env_from_doc(params.get("target_env")),
        v=params.get("v", decision_mod.DEFAULT_V),
    )
    project.decision_doc = run.to_report()
    return {"ranking": list(run.result.ranking), "compromise_set": list(run.result.compromise_set)}


def _run_clustered(project: Project, params: dict) -> dict:
    if project.decision_doc is None:
        raise BioinvertError("no decision result to cluster")
    result = vikor_result_from_report(project.decision_doc["vikor"])
    kept_frames = {r.id: r.engineering_frame for r in project.kept_results()}
    report = decision_mod.cluster_top(result, kept_frames, params["k"], params["threshold"])
    project.cluster_doc = report.to_report()
    return {"clusters": [list(c) for c in report.clusters], "composites": [f.id for f in report.composites]}


_STAGE_RUNNERS = {
    Stage.INGESTED: _run_ingested,
    Stage.CLASSIFIED: _run_classified,
    Stage.REVIEWED: _run_reviewed,
    Stage.FRAMED: _run_framed,
    Stage.INVERTED: _run_inverted,
    Stage.SCREENED: _run_screened,
    Stage.RANKED: _run_ranked,
    Stage.CLUSTERED: _run_clustered,
}


def vikor_result_from_report(report: dict) -> decision_mod.VikorResult:
    conditions = report["conditions"]
    return decision_mod.VikorResult(
        alternatives=tuple(report["alternatives"]),
        S=dict(report["S"]),
        R=dict(report["R"]),
        Q=dict(report["Q"]),
        v=report["v"],
        ranking=tuple(report["ranking"]),
        compromise_set=tuple(report["compromise_set"]),
        acceptable_advantage=conditions["acceptable_advantage"],
        acceptable_stability=conditions["acceptable_stability"],
        dq=conditions["dq"],
        warnings=tuple(report["warnings"]),
    )


def apply_event(project: Project, op: str, params: dict) -> dict:
    """Apply one event to the project state; returns the op report."""
    if op == "set_problem":
        project.problem = DesignProblem(
            level=Level(params["level"]),
            requirement_elements=tuple(params["requirement_elements"]),
            processing_elements=tuple(params.get("processing_elements", ())),
            description=params.get("description", ""),
        )
        return {"problem": params}
    if op == "set_kb":
        load_kb(params["kb"])  # validate before storing
        project.kb_doc = params["kb"]
        return {"mappings": len(params["kb"].get("mappings", ()))}
    if op == "run_stage":
        stage = Stage(params["stage"])
        _require_prior(project, stage, params.get("force", False))
        report = _STAGE_RUNNERS[stage](project, params)
        record = project.stages[stage]
        record.complete = _stage_complete_after_run(project, stage)
        record.stale = False
        record.params = {k: v for k, v in params.items() if k != "stage"}
        record.seed = params.get("seed")
        _mark_downstream_stale(project, stage)
        return report
    if op == "verdict":
        batch = _find_batch(project, params["batch_no"])
        corpus_mod.record_verdict(batch, params["item_id"], Verdict(params["verdict"]))
        _refresh_review_completion(project)
        return {"batch_no": batch.batch_no, "status": batch.status.value}
    if op == "verdicts":
        batch = _find_batch(project, params["batch_no"])
        for item_id, verdict in params["verdicts"].items():
            corpus_mod.record_verdict(batch, item_id, Verdict(verdict))
        _refresh_review_completion(project)
        return {"batch_no": batch.batch_no, "status": batch.status.value}
    if op == "review_step":
        relabeler = _make_classifier(params.get("backend", "lexicon"), params.get("config"))
        _, done = corpus_mod.review_loop_step(project.batches, relabeler, params["seed"])
        _refresh_review_completion(project)
        return {"done": done, "statuses": [b.status.value for b in project.batches]}
    if op == "samples":
        paraphraser = llm_mod.MockLlmClient().paraphrase
        sample_set = corpus_mod.generate_samples(
            project.labeled,
            params["target_size"],
            params["ratio_real"],
            params["seed"],
            paraphraser,
        )
        project.samples_doc = _samples_to_doc(sample_set)
        return {"real": len(sample_set.real), "augmented": len(sample_set.augmented)}
    if op == "cluster_assessment":
        # Designer's free-text likelihood assessment per cluster; persisted,
        # never scored.
        project.cluster_notes[params["cluster"]] = params["text"]
        return {"cluster": params["cluster"], "text": params["text"]}
    if op == "g1_judgment":
        judgment = decision_mod.G1Judgment(tuple(params["order"]), tuple(params["ratios"]))
        weights = decision_mod.g1_weights(judgment)  # validates ratios and length
        project.judgment_doc = {"order": list(params["order"]), "ratios": list(params["ratios"])}
        return {"weights": weights}
    if op == "put_frame":
        frame = parse_frame(params["frame"])
        issues = frames_mod.validate_frame(frame)
        if issues:
            raise SchemaError(
                "frame has validation violations",
                path=issues[0].path,
                violations=[{"code": i.code, "path": i.path, "message": i.message} for i in issues],
            )
        project.frames[frame.id] = frame
        _mark_downstream_stale(project, Stage.FRAMED)
        return {"frame": frame.id}
    raise ValueError(f"unknown op {op!r}")


def _stage_complete_after_run(project: Project, stage: Stage) -> bool:
    if stage is Stage.REVIEWED:
        return all(b.status is BatchStatus.CLEAN for b in project.batches)
    return True


def _refresh_review_completion(project: Project) -> None:
    record = project.stages[Stage.REVIEWED]
    if project.batches:
        record.complete = all(b.status is BatchStatus.CLEAN for b in project.batches)


def _find_batch(project: Project, batch_no: int) -> ReviewBatch:
    for batch in project.batches:
        if batch.batch_no == batch_no:
            return batch
    raise KeyError(f"no batch {batch_no}")


def record(project: Project, op: str, params: dict) -> dict:
    """Append an event and apply it; the only mutation entry point."""
    event = {"seq": len(project.events) + 1, "op": op, "params": params}
    report = apply_event(project, op, params)
    project.events.append(event)
    return report


def replay(events: list[dict], project_id: str, name: str = "") -> Project:
    """Fold the event log over an empty project."""
    project = Project(id=project_id, name=name)
    for event in events:
        apply_event(project, event["op"], event["params"])
        project.events.append(event)
    return project


# ---------------------------------------------------------------------------
# Persistence (plain project directory, atomic writes)
# ---------------------------------------------------------------------------


def _dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + f".tmp{os.getpid()}")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _samples_to_doc(sample_set: corpus_mod.SampleSet) -> dict:
    return {
        "target_size": sample_set.target_size,
        "ratio_real": sample_set.ratio_real,
        "real": [labeled_to_record(item) for item in sample_set.real],
        "augmented": [
            {"origin_id": a.origin_id, "paraphrase": a.paraphrase, "labels": sorted(d.value for d in a.labels)}
            for a in sample_set.augmented
        ],
    }


def _batch_to_doc(batch: ReviewBatch) -> dict:
    return {
        "batch_no": batch.batch_no,
        "items": [labeled_to_record(i) for i in batch.items],
        "audit_sample": list(batch.audit_sample),
        "verdicts": {k: v.value for k, v in sorted(batch.verdicts.items())},
        "status": batch.status.value,
        "rounds": batch.rounds,
    }


def _batch_from_doc(doc: dict) -> ReviewBatch:
    return ReviewBatch(
        batch_no=doc["batch_no"],
        items=[labeled_from_record(r) for r in doc["items"]],
        audit_sample=tuple(doc["audit_sample"]),
        verdicts={k: Verdict(v) for k, v in doc["verdicts"].items()},
        status=BatchStatus(doc["status"]),
        rounds=doc["rounds"],
    )


def _inversion_to_doc(result: InversionResult) -> dict:
    return {
        "engineering_frame": serialize_frame(result.engineering_frame),
        "source_frame": serialize_frame(result.source_frame),
        "substitutions": [[s.slot, s.bio_term, s.eng_term] for s in result.substitutions],
        "unresolved": list(result.unresolved),
        "corrections": [
            {"slot": c.slot, "before": c.before, "after": c.after, "justification": c.justification}
            for c in result.corrections
        ],
        "flags": [{"terms": list(f.terms), "rationale": f.rationale} for f in result.flags],
    }


def _inversion_from_doc(doc: dict) -> InversionResult:
    return InversionResult(
        engineering_frame=parse_frame(doc["engineering_frame"]),
        source_frame=parse_frame(doc["source_frame"]),
        substitutions=tuple(Substitution(*entry) for entry in doc["substitutions"]),
        unresolved=tuple(doc["unresolved"]),
        corrections=tuple(
            llm_mod.SlotChange(c["slot"], c["before"], c["after"], c["justification"])
            for c in doc["corrections"]
        ),
        flags=tuple(
            llm_mod.CompatibilityFlag((f["terms"][0], f["terms"][1]), f["rationale"]) for f in doc["flags"]
        ),
    )


def _sentence_to_doc(record: SentenceRecord) -> dict:
    return {"id": record.id, "doc_id": record.doc_id, "text": record.text, "span": list(record.span)}


def _sentence_from_doc(doc: dict) -> SentenceRecord:
    return SentenceRecord(doc["id"], doc["doc_id"], doc["text"], tuple(doc["span"]))


def _problem_to_doc(problem: DesignProblem | None) -> dict | None:
    if problem is None:
        return None
    return {
        "level": problem.level.value,
        "requirement_elements": list(problem.requirement_elements),
        "processing_elements": list(problem.processing_elements),
        "description": problem.description,
    }


def _problem_from_doc(doc: dict | None) -> DesignProblem | None:
    if doc is None:
        return None
    return DesignProblem(
        level=Level(doc["level"]),
        requirement_elements=tuple(doc["requirement_elements"]),
        processing_elements=tuple(doc["processing_elements"]),
        description=doc["description"],
    )


def export_bundle(project: Project) -> dict:
    """Everything the project holds, as one canonical document."""
    return {
        "fbce_version": PROJECT_VERSION,
        "project": {
            "id": project.id,
            "name": project.name,
            "problem": _problem_to_doc(project.problem),
            "kb": project.kb_doc,
            "judgment": project.judgment_doc,
            "stages": project.workflow_state(),
        },
        "corpus": {
            "docs": project.docs,
            "sentences": [_sentence_to_doc(s) for s in project.sentences],
        },
        "labeled": [labeled_to_record(i) for i in project.labeled],
        "batches": [_batch_to_doc(b) for b in project.batches],
        "samples": project.samples_doc,
        "frames": [serialize_frame(f) for f in project.frames.values()],
        "inversions": [_inversion_to_doc(r) for r in project.inversions],
        "screening": {
            rid: {"decision": v.decision.value, "reason": v.reason}
            for rid, v in sorted(project.screening.items())
        },
        "decision": project.decision_doc,
        "clusters": project.cluster_doc,
        "cluster_assessments": dict(sorted(project.cluster_notes.items())),
        "events": project.events,
    }


def export_bytes(project: Project) -> bytes:
    return (_dumps(export_bundle(project)) + "\n").encode("utf-8")


_FILES = (
    "project.json",
    "corpus.json",
    "labeled.json",
    "batches.json",
    "samples.json",
    "frames.json",
    "inversions.json",
    "screening.json",
    "decision.json",
    "clusters.json",
)


def persist(project: Project, root: str | Path) -> Path:
    """Write the project directory; partial writes never corrupt it."""
    directory = Path(root) / project.id
    directory.mkdir(parents=True, exist_ok=True)
    bundle = export_bundle(project)
    payloads = {
        "project.json": bundle["project"] | {"fbce_version": PROJECT_VERSION},
        "corpus.json": bundle["corpus"],
        "labeled.json": bundle["labeled"],
        "batches.json": bundle["batches"],
        "samples.json": bundle["samples"],
        "frames.json": bundle["frames"],
        "inversions.json": bundle["inversions"],
        "screening.json": bundle["screening"],
        "decision.json": bundle["decision"],
        "clusters.json": {"report": bundle["clusters"], "assessments": bundle["cluster_assessments"]},
    }
    try:
        for name, payload in payloads.items():
            _write_atomic(directory / name, _dumps(payload) + "\n")
        _write_atomic(
            directory / "events.jsonl",
            "".join(_dumps(e) + "\n" for e in project.events),
        )
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return directory


def load(root: str | Path, project_id: str) -> Project:
    directory = Path(root) / project_id
    if not directory.is_dir():
        raise IoError(f"no project directory {directory}")

    def read(name: str):
        path = directory / name
        try:
            return json.loads(path.read_text("utf-8"))
        except FileNotFoundError as exc:
            raise IoError(f"missing {name}") from exc
        except json.JSONDecodeError as exc:
            raise SchemaError(f"corrupt {name}: {exc}", path=f"/{name}") from exc

    meta = read("project.json")
    if meta.get("fbce_version") != PROJECT_VERSION:
        raise VersionMismatchError(f"expected fbce_version {PROJECT_VERSION}, got {meta.get('fbce_version')!r}")

    project = Project(id=meta["id"], name=meta["name"])
    project.problem = _problem_from_doc(meta["problem"])
    project.kb_doc = meta["kb"]
    project.judgment_doc = meta.get("judgment")
    for stage in STAGE_ORDER:
        raw = meta["stages"][stage.value]
        project.stages[stage] = StageRecord(
            complete=raw["complete"], stale=raw["stale"], params=raw["params"], seed=raw["seed"]
        )

    corpus_doc = read("corpus.json")
    project.docs = dict(corpus_doc["docs"])
    project.sentences = [_sentence_from_doc(s) for s in corpus_doc["sentences"]]
    project.labeled = [labeled_from_record(r) for r in read("labeled.json")]
    project.batches = [_batch_from_doc(b) for b in read("batches.json")]
    project.samples_doc = read("samples.json")
    project.frames = {}
    for doc in read("frames.json"):
        frame = parse_frame(doc)
        project.frames[frame.id] = frame
    project.inversions = [_inversion_from_doc(d) for d in read("inversions.json")]
    project.screening = {
        rid: ScreenVerdict(ScreenDecision(v["decision"]), v["reason"])
        for rid, v in read("screening.json").items()
    }
    project.decision_doc = read("decision.json")
    clusters_doc = read("clusters.json")
    project.cluster_doc = clusters_doc["report"]
    project.cluster_notes = dict(clusters_doc["assessments"])

    events_path = directory / "events.jsonl"
    if events_path.exists():
        project.events = [json.loads(line) for line in events_path.read_text("utf-8").splitlines() if line]
    return project


def list_projects(root: str | Path) -> list[str]:
    root = Path(root)
    if not root.is_dir():
        return []
    return sorted(p.name for p in root.iterdir() if (p / "project.json").is_file())


DEFAULT_CONFIG = {
    "port": 8123,
    "llm_base_url": "http://localhost:8080/v1",
    "llm_model": "default",
    "threshold": corpus_mod.DEFAULT_THRESHOLD,
    "ratio_real": 0.8,
}


def read_config(root: str | Path, project_id: str) -> dict:
    """The single per-project config file (config.json in the project root).

    Unknown keys are kept; defaults fill anything missing. The LLM
    credential never lives here: only the BIOINVERT_LLM_KEY environment
    variable carries it.
    """
    path = Path(root) / project_id / "config.json"
    config = dict(DEFAULT_CONFIG)
    if path.is_file():
        config.update(json.loads(path.read_text("utf-8")))
    return config


def project_lock(root: str | Path, project_id: str) -> FileLock:
    """Advisory one-writer-per-project lock."""
    directory = Path(root) / project_id
    directory.mkdir(parents=True, exist_ok=True)
    return FileLock(str(directory / ".lock"))
