import json

import httpx
import pytest

from bioinvert.errors import (
    AuthError,
    KbEmptyError,
    RateLimitedError,
    SchemaRejectedError,
    TransportError,
)
from bioinvert.frames import ActionDescription, Behavior, Characteristic, Provenance, StrategyFrame
from bioinvert.inversion import CompatibilityRule, EngineeringKB, TermMapping, demo_kb
from bioinvert.llm import (
    HttpLlmClient,
    LlmClassifier,
    MockLlmClient,
    RetryPolicy,
    correct_frame,
    label_task,
    paraphrase_task,
)


class TestMockBackend:
    def test_label_example(self):
        response = MockLlmClient().complete(label_task("The mantle stores elastic energy."))
        assert response.parsed == {"labels": ["Characteristic", "Function"]}

    def test_mock_is_pure(self):
        client = MockLlmClient()
        task = label_task("Red muscle fibers contract to drive the tail fin.")
        assert client.complete(task) == client.complete(task)

    def test_paraphrase_preserves_content_nouns(self):
        client = MockLlmClient()
        sentence = "It uses the mantle to move water rapidly."
        out = client.paraphrase(sentence)
        assert out != sentence
        for noun in ("mantle", "water"):
            assert noun in out
        assert client.paraphrase(sentence) == out

    def test_paraphrase_prefix_fallback(self):
        out = MockLlmClient().paraphrase("Zzz qqq www.")
        assert out.startswith("Put differently, ")

    def test_unknown_template_rejected(self):
        from bioinvert.llm import LlmTask, TaskKind

        with pytest.raises(KeyError):
            LlmTask(TaskKind.LABEL, "nope_v9", "x", "label.v1")


def _http_client(handler, **kwargs) -> HttpLlmClient:
    sleeps = kwargs.pop("sleeps", [])
    return HttpLlmClient(
        base_url="http://llm.test/v1",
        model="test-model",
        api_key=kwargs.pop("api_key", "k-123"),
        transport=httpx.MockTransport(handler),
        sleep=sleeps.append,
        **kwargs,
    )


def _ok_body(content: dict) -> dict:
    return {
        "choices": [{"message": {"content": json.dumps(content)}}],
        "usage": {"prompt_tokens": 10, "completion_tokens": 5},
    }


class TestHttpBackend:
    def test_success_parses_and_validates(self):
        def handler(request):
            assert request.headers["Authorization"] == "Bearer k-123"
            return httpx.Response(200, json=_ok_body({"labels": ["Function"]}))

        response = _http_client(handler).complete(label_task("It pumps."))
        assert response.parsed == {"labels": ["Function"]}
        assert response.attempt == 1

    def test_invalid_credential_fails_fast(self):
        attempts = []

        def handler(request):
            attempts.append(1)
            return httpx.Response(401, json={"error": "bad key"})

        with pytest.raises(AuthError):
            _http_client(handler).complete(label_task("x"))
        assert len(attempts) == 1  # zero retries on credential errors

    def test_missing_credential_fails_before_transport(self, monkeypatch):
        monkeypatch.delenv("BIOINVERT_LLM_KEY", raising=False)

        def handler(request):  # pragma: no cover - must not be reached
            raise AssertionError("no request should be sent")

        with pytest.raises(AuthError):
            _http_client(handler, api_key=None).complete(label_task("x"))

    def test_transport_errors_retry_with_backoff(self):
        attempts = []
        sleeps = []

        def handler(request):
            attempts.append(1)
            if len(attempts) < 3:
                raise httpx.ConnectError("refused")
            return httpx.Response(200, json=_ok_body({"labels": []}))

        client = _http_client(handler, sleeps=sleeps)
        response = client.complete(label_task("x"), RetryPolicy(max_attempts=3, base_delay=0.1))
        assert response.attempt == 3
        assert sleeps == [0.1, 0.2]  # exponential backoff

    def test_rate_limit_honors_retry_after(self):
        attempts = []
        sleeps = []

        def handler(request):
            attempts.append(1)
            if len(attempts) == 1:
                return httpx.Response(429, headers={"Retry-After": "1.5"}, json={})
            return httpx.Response(200, json=_ok_body({"labels": []}))

        client = _http_client(handler, sleeps=sleeps)
        client.complete(label_task("x"), RetryPolicy(max_attempts=3, base_delay=0.1))
        assert sleeps == [1.5]

    def test_rate_limit_exhaustion_raises(self):
        def handler(request):
            return httpx.Response(429, headers={"Retry-After": "0.1"}, json={})

        with pytest.raises(RateLimitedError):
            _http_client(handler).complete(label_task("x"), RetryPolicy(max_attempts=2, base_delay=0.01))

    def test_schema_invalid_reply_retries_then_rejects(self):
        attempts = []

        def handler(request):
            attempts.append(1)
            return httpx.Response(200, json=_ok_body({"labels": ["NotADimension"]}))

        with pytest.raises(SchemaRejectedError):
            _http_client(handler).complete(label_task("x"), RetryPolicy(max_attempts=3, base_delay=0.01))
        assert len(attempts) == 3

    def test_free_prose_rejected(self):
        def handler(request):
            return httpx.Response(
                200, json={"choices": [{"message": {"content": "Sure! The labels are Function."}}]}
            )

        with pytest.raises(SchemaRejectedError):
            _http_client(handler).complete(label_task("x"), RetryPolicy(max_attempts=1))

    def test_server_errors_exhaust_to_transport_error(self):
        def handler(request):
            return httpx.Response(503, json={})

        with pytest.raises(TransportError):
            _http_client(handler).complete(label_task("x"), RetryPolicy(max_attempts=2, base_delay=0.01))

    def test_trace_redacts_credential(self, tmp_path):
        trace = tmp_path / "trace.jsonl"

        def handler(request):
            return httpx.Response(200, json=_ok_body({"labels": []}))

        client = _http_client(handler, trace_path=str(trace))
        client.complete(label_task("secret payload"))
        content = trace.read_text()
        assert "k-123" not in content
        assert '"task":"Label"' in content.replace(" ", "")


class TestLlmClassifier:
    def test_scores_follow_mock_labels(self):
        classifier = LlmClassifier(MockLlmClient())
        scores = classifier.score("The mantle stores elastic energy.")
        from bioinvert.frames import Dimension

        assert scores[Dimension.FUNCTION] == 1.0
        assert scores[Dimension.CHARACTERISTIC] == 1.0
        assert scores[Dimension.BEHAVIOR] == 0.0

    def test_unreachable_backend_maps_to_classifier_unavailable(self):
        from bioinvert.errors import ClassifierUnavailableError

        def handler(request):
            raise httpx.ConnectError("down")

        client = _http_client(handler)
        classifier = LlmClassifier(client, RetryPolicy(max_attempts=1))
        with pytest.raises(ClassifierUnavailableError):
            classifier.score("x")


def _bio_frame() -> StrategyFrame:
    return StrategyFrame(
        id="bio",
        behavior=Behavior("Provide underwater thrust"),
        functions=(ActionDescription("contracting", "mantle"),),
        characteristics=(Characteristic("mantle", ("elastic",)),),
        provenance=Provenance(),
    )


class TestCorrectFrame:
    def test_kb_mapping_replaces_noun_with_change_log(self):
        kb = EngineeringKB(mappings=(TermMapping("mantle", "elastic chamber"),))
        corrected = correct_frame(_bio_frame(), kb, MockLlmClient())
        assert corrected.frame.functions[0].phrase() == "contracting elastic chamber"
        slots = [c.slot for c in corrected.changes]
        assert "/functions/0/object" in slots and "/characteristics/0" in slots
        for change in corrected.changes:
            assert change.before != change.after
            assert "mantle" in change.before

    def test_fixed_point_has_empty_change_log(self, jet_frame):
        kb = demo_kb()
        once = correct_frame(jet_frame, kb, MockLlmClient())
        twice = correct_frame(once.frame, kb, MockLlmClient())
        assert twice.changes == ()

    def test_idempotent_on_own_output(self):
        kb = demo_kb()
        once = correct_frame(_bio_frame(), kb, MockLlmClient())
        assert once.changes != ()
        twice = correct_frame(once.frame, kb, MockLlmClient())
        assert twice.changes == ()

    def test_empty_kb_rejected(self):
        empty = EngineeringKB(mappings=())
        with pytest.raises(KbEmptyError):
            correct_frame(_bio_frame(), empty, MockLlmClient())

    def test_disallowed_pair_flagged_not_rewritten(self):
        kb = EngineeringKB(
            mappings=(TermMapping("mantle", "elastic pressure chamber"),),
            compatibility_rules=(
                CompatibilityRule(
                    ("linear actuator", "elastic pressure chamber"),
                    "disallowed",
                    "rigid drive defeats compliant chamber",
                ),
            ),
            vocabulary=frozenset({"linear actuator"}),
        )
        frame = StrategyFrame(
            id="f",
            behavior=Behavior("Crawling"),
            functions=(ActionDescription("driving", "linear actuator"),),
            characteristics=(Characteristic("mantle",),),
            provenance=Provenance(),
        )
        corrected = correct_frame(frame, kb, MockLlmClient())
        assert corrected.flags
        assert corrected.flags[0].terms == ("linear actuator", "elastic pressure chamber")
