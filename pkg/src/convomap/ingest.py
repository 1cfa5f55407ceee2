"""Parse a conversation export file into ordered question/answer nodes.

The export format is a JSON document::

    {"title": "...", "messages": [{"role": "user"|"assistant",
                                   "content": "...", "ts": "..."?}, ...]}

Unknown top-level keys and unknown message keys are ignored. Any role
other than "user" or "assistant" is a schema error.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import ExportSchemaError, ParseError, StructuralError
from .model import ConversationNode

VALID_ROLES = ("user", "assistant")

# Rule-of-thumb tokenizer: one token per 4 characters, rounded up. A real
# tokenizer can be swapped in behind count_tokens; every token budget in
# the package flows through this function.
CHARS_PER_TOKEN = 4


@dataclass
class RawMessage:
    role: str
    content: str
    ts: str | None = None


@dataclass
class RawExport:
    title: str
    messages: list[RawMessage]


def count_tokens(text: str) -> int:
    """Deterministic token estimate: ceil(len(text) / 4)."""
    if not text:
        return 0
    return math.ceil(len(text) / CHARS_PER_TOKEN)


def parse_export(data: bytes) -> RawExport:
    """Decode export bytes, validating syntax and the message schema."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"export is not valid UTF-8: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc

    if not isinstance(doc, dict):
        raise ExportSchemaError("export top level must be a JSON object")
    title = doc.get("title", "")
    if not isinstance(title, str):
        raise ExportSchemaError("'title' must be a string")
    raw_messages = doc.get("messages")
    if not isinstance(raw_messages, list):
        raise ExportSchemaError("'messages' must be an array")

    messages: list[RawMessage] = []
    for i, entry in enumerate(raw_messages):
        if not isinstance(entry, dict):
            raise ExportSchemaError(f"message {i} must be an object")
        role = entry.get("role")
        if role not in VALID_ROLES:
            raise ExportSchemaError(f"message {i} has unsupported role {role!r}")
        content = entry.get("content")
        if not isinstance(content, str):
            raise ExportSchemaError(f"message {i} 'content' must be a string")
        ts = entry.get("ts")
        if ts is not None and not isinstance(ts, str):
            raise ExportSchemaError(f"message {i} 'ts' must be a string when present")
        messages.append(RawMessage(role=role, content=content, ts=ts))

    return RawExport(title=title, messages=messages)


def pair_messages(raw: RawExport) -> list[ConversationNode]:
    """Pair each user message with the assistant reply that follows it.

    Consecutive messages from the same role are merged with blank lines,
    so one node corresponds to one maximal user run. A trailing user run
    without a reply becomes a node with an empty answer.
    """
    if raw.messages and raw.messages[0].role == "assistant":
        raise StructuralError("export begins with an assistant message")

    nodes: list[ConversationNode] = []
    question_parts: list[str] = []
    answer_parts: list[str] = []

    def flush() -> None:
        if not question_parts:
            return
        question = "\n\n".join(question_parts)
        answer = "\n\n".join(answer_parts)
        seq = len(nodes)
        nodes.append(
            ConversationNode(
                id=f"n{seq}",
                seq_index=seq,
                question=question,
                answer=answer,
                token_count=count_tokens(question + answer),
            )
        )
        question_parts.clear()
        answer_parts.clear()

    for message in raw.messages:
        if message.role == "user":
            if answer_parts:
                flush()
            question_parts.append(message.content)
        else:
            answer_parts.append(message.content)
    flush()

    return nodes
