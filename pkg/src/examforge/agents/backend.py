"""Chat-completion backends.

All agent prompts flow through a single complete() contract so any
chat-completion service can plug in. The mock backend is a pure function
of (prompt, seed): it renders templated exam items and answers solve
requests only from reference material present in the prompt, which makes
every pipeline reproducible without network access.

Structured outputs use an answer-envelope convention: the payload the
caller must parse sits on lines with fixed uppercase prefixes, and final
answers are on a line starting with ``ANSWER:``.
"""

from __future__ import annotations

import abc
import hashlib
import json
import os
import urllib.error
import urllib.request
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..errors import BackendError

ENV_BASE_URL = "EXAMFORGE_BACKEND_URL"
ENV_API_KEY = "EXAMFORGE_API_KEY"
ENV_MODEL = "EXAMFORGE_MODEL"


@dataclass(frozen=True)
class DecodeParams:
    temperature: float = 0.0
    max_tokens: int = 2048


class ChatBackend(abc.ABC):
    backend_id: str = "abstract"
    deterministic: bool = False

    @abc.abstractmethod
    def complete(
        self,
        system: str,
        messages: Sequence[Mapping[str, str]],
        params: DecodeParams,
        seed: int,
    ) -> str:
        ...


def _stable_seed(*parts: object) -> int:
    digest = hashlib.blake2b("\x1f".join(str(p) for p in parts).encode("utf-8"), digest_size=8)
    return int.from_bytes(digest.digest(), "big")


def _field(text: str, prefix: str) -> str | None:
    for line in text.splitlines():
        if line.startswith(prefix):
            return line[len(prefix):].strip()
    return None


_MCQ_STEMS = (
    "For the {topic} setting, a quantity starts at {a} and changes by {b} per step. "
    "After {c} steps, which value is reached?",
    "A {topic} exercise defines f(n) = {a} + {b} n. What is f({c})?",
    "In a {topic} drill the reading grows from {a} in increments of {b}. "
    "Find the reading after {c} increments.",
)

_TF_STEMS = (
    "A {topic} scenario tracks the values {a}, {b}, {c} measured in order. Judge each claim.",
    "Consider a {topic} model with parameters {a}, {b} and observation {c}. Judge each claim.",
)

_TF_STATEMENTS = (
    "The first value exceeds {b}.",
    "The total of all listed values is even.",
    "The sequence is strictly increasing.",
    "Doubling the last value keeps it below {t}.",
)

_SHORT_STEMS = (
    "A {topic} task uses a rectangle of {a} by {b} units with {c} units removed. "
    "Compute the remaining area.",
    "In a {topic} problem a batch of {a} units yields {b} per unit minus a fixed loss of {c}. "
    "Compute the net amount.",
)

_EXPLANATION_SLOTS = (
    "content requirement",
    "competency",
    "criteria",
    "indicator",
    "cognitive level",
    "question format",
    "review orientation",
    "review topics",
)

_LEVEL_NAMES = {1: "recognition", 2: "comprehension", 3: "application"}


class MockBackend(ChatBackend):
    """Template-driven stand-in for a hosted model.

    fallback controls behaviour when a solve prompt has no matching
    reference: "abstain" answers UNKNOWN, "guess" answers deterministically
    from the seed.
    """

    backend_id = "mock"
    deterministic = True

    def __init__(self, fallback: str = "abstain"):
        if fallback not in ("abstain", "guess"):
            raise ValueError(f"unknown fallback policy {fallback!r}")
        self.fallback = fallback

    def complete(self, system, messages, params, seed):
        if not messages:
            raise BackendError("empty message list")
        prompt = messages[-1].get("content", "")
        task = _field(prompt, "TASK:")
        if task == "generate-item":
            return self._generate_item(prompt, seed)
        if task == "solve-item":
            return self._solve_item(prompt, seed)
        raise BackendError(f"mock backend cannot serve task {task!r}")

    # ------------------------------------------------------------------

    def _generate_item(self, prompt: str, seed: int) -> str:
        cell = _field(prompt, "CELL:")
        if cell is None:
            raise BackendError("generate-item prompt is missing its CELL line")
        fields = dict(part.split("=", 1) for part in cell.split() if "=" in part)
        topic = fields.get("topic", "general").replace("+", " ")
        section = fields.get("section", "I")
        level = int(fields.get("level", "1"))
        slot = fields.get("slot", "0")
        rng = np.random.default_rng(_stable_seed(seed, cell))
        a, b, c = (int(rng.integers(2, 60)) for _ in range(3))

        lines: list[str]
        if section == "I":
            stem = _MCQ_STEMS[int(rng.integers(len(_MCQ_STEMS)))].format(
                topic=topic.lower(), a=a, b=b, c=c
            )
            correct = a + b * c
            options = [correct, correct + b, correct - b, correct + 2 * b + 1]
            key = int(rng.integers(4))
            options[0], options[key] = options[key], options[0]
            lines = [f"STEM: {stem}"]
            for letter, value in zip("ABCD", options):
                lines.append(f"CHOICE-{letter}: {value}")
            lines.append(f"KEY: {'ABCD'[key]}")
            solution = (
                f"Step 1: apply the rule {a} + {b} x {c}. "
                f"Step 2: obtain {correct} and match the option."
            )
        elif section == "II":
            stem = _TF_STEMS[int(rng.integers(len(_TF_STEMS)))].format(
                topic=topic.lower(), a=a, b=b, c=c
            )
            bits = [bool(rng.integers(2)) for _ in range(4)]
            lines = [f"STEM: {stem}"]
            for letter, template in zip("ABCD", _TF_STATEMENTS):
                lines.append(
                    f"STATEMENT-{letter}: {template.format(a=a, b=b, c=c, t=a + b + c)}"
                )
            lines.append("KEY: " + ",".join("T" if bit else "F" for bit in bits))
            solution = (
                "Step 1: evaluate each claim against the listed values. "
                "Step 2: mark the verdicts in order."
            )
        elif section == "III":
            stem = _SHORT_STEMS[int(rng.integers(len(_SHORT_STEMS)))].format(
                topic=topic.lower(), a=a, b=b, c=c
            )
            value = a * b - c
            lines = [f"STEM: {stem}", f"KEY: {value}", "ROUND: 2"]
            solution = (
                f"Step 1: form the product {a} x {b}. "
                f"Step 2: subtract {c} to reach {value}."
            )
        else:
            raise BackendError(f"unknown section {section!r} in CELL line")

        lines.append(f"SOLUTION: {solution}")
        explanation = "; ".join(
            f"{i}. {slot_name}: {topic} ({_LEVEL_NAMES.get(level, level)}, slot {slot})"
            for i, slot_name in enumerate(_EXPLANATION_SLOTS, start=1)
        )
        lines.append(f"EXPLANATION: {explanation}")
        return "\n".join(lines)

    # ------------------------------------------------------------------

    def _solve_item(self, prompt: str, seed: int) -> str:
        item_state = _field(prompt, "ITEM-STATE:")
        section = _field(prompt, "SECTION:") or "I"
        reference = self._matching_reference(prompt, item_state)
        if reference is not None:
            return (
                "STEPS:\n"
                "Step 1: match the problem against a solved reference case.\n"
                "Step 2: reuse the verified result from memory.\n"
                f"ANSWER: {reference}"
            )
        if self.fallback == "abstain":
            return "STEPS:\nStep 1: no reference material matched.\nANSWER: UNKNOWN"
        rng = np.random.default_rng(_stable_seed(seed, item_state or prompt))
        if section == "I":
            guess = "ABCD"[int(rng.integers(4))]
        elif section == "II":
            guess = ",".join("T" if rng.integers(2) else "F" for _ in range(4))
        else:
            guess = str(int(rng.integers(0, 10000)))
        return (
            "STEPS:\nStep 1: no reference matched; fall back to a best-effort guess.\n"
            f"ANSWER: {guess}"
        )

    @staticmethod
    def _matching_reference(prompt: str, item_state: str | None) -> str | None:
        """Answer token from the context case whose state matches the item."""
        if item_state is None:
            return None
        current_state: str | None = None
        for line in prompt.splitlines():
            if line.startswith("STATE:"):
                current_state = line[len("STATE:"):].strip()
            elif line.startswith("ACTION:") and current_state == item_state:
                answer = _field(line[len("ACTION:"):].strip(), "ANSWER:")
                if answer:
                    return answer
        return None


class HttpBackend(ChatBackend):
    """Minimal chat-completion client for a vendor-neutral HTTP endpoint.

    Configuration comes from constructor arguments or the EXAMFORGE_*
    environment variables. Responses may carry the completion either as
    OpenAI-style choices or a bare "text" field.
    """

    deterministic = False

    def __init__(
        self,
        base_url: str | None = None,
        api_key: str | None = None,
        model: str | None = None,
        timeout: float = 60.0,
    ):
        self.base_url = base_url or os.environ.get(ENV_BASE_URL, "")
        self.api_key = api_key or os.environ.get(ENV_API_KEY, "")
        self.model = model or os.environ.get(ENV_MODEL, "")
        self.timeout = timeout
        if not self.base_url:
            raise BackendError(f"no backend URL configured (set {ENV_BASE_URL})")
        self.backend_id = f"http:{self.model or 'default'}"

    def complete(self, system, messages, params, seed):
        payload = {
            "model": self.model,
            "messages": [{"role": "system", "content": system}, *messages],
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
            "seed": seed,
        }
        request = urllib.request.Request(
            self.base_url,
            data=json.dumps(payload).encode("utf-8"),
            headers={
                "Content-Type": "application/json",
                **({"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}),
            },
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                body = json.loads(response.read().decode("utf-8"))
        except (urllib.error.URLError, json.JSONDecodeError, OSError) as exc:
            raise BackendError(f"backend request failed: {exc}") from exc
        if "choices" in body:
            try:
                return body["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError) as exc:
                raise BackendError(f"malformed completion payload: {exc}") from exc
        if "text" in body:
            return str(body["text"])
        raise BackendError("completion payload has neither choices nor text")
