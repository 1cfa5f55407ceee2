"""Orchestration engine plus the HTTP JSON API.

The Engine drives the full pipeline against a file store and is shared
by the HTTP layer and the CLI, so both expose identical behavior. Run
the service with::

    uvicorn convomap.service:create_app --factory

Configuration comes from the environment: CONVOMAP_STORE, CONVOMAP_PROVIDER
(offline|remote), CONVOMAP_DIMENSION, CONVOMAP_BUDGET, CONVOMAP_THRESHOLD,
CONVOMAP_EDGE_THRESHOLD, CONVOMAP_SEED, plus the remote endpoint variables
documented in the embedding and topics modules.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import global_layout, retrieval, topic_layout, topics
from .embedding import DEFAULT_DIMENSION, OfflineEmbeddingProvider, RemoteEmbeddingProvider
from .errors import (
    ArgumentError,
    BudgetError,
    CapacityError,
    ConvomapError,
    ExportSchemaError,
    NotFoundError,
    ParseError,
    ProviderError,
    StateError,
    StructuralError,
)
from .ingest import count_tokens, pair_messages, parse_export
from .model import Conversation, ConversationNode
from .store import Store


@dataclass
class ServiceConfig:
    store_path: Path = field(default_factory=lambda: Path("convomap-store"))
    provider: str = "offline"
    dimension: int = DEFAULT_DIMENSION
    token_budget: int = global_layout.DEFAULT_TOKEN_BUDGET
    membership_threshold: float = 0.5
    edge_threshold: float = 0.5
    seed: int = 0

    @classmethod
    def from_env(cls) -> "ServiceConfig":
        return cls(
            store_path=Path(os.environ.get("CONVOMAP_STORE", "convomap-store")),
            provider=os.environ.get("CONVOMAP_PROVIDER", "offline"),
            dimension=int(os.environ.get("CONVOMAP_DIMENSION", str(DEFAULT_DIMENSION))),
            token_budget=int(
                os.environ.get("CONVOMAP_BUDGET", str(global_layout.DEFAULT_TOKEN_BUDGET))
            ),
            membership_threshold=float(os.environ.get("CONVOMAP_THRESHOLD", "0.5")),
            edge_threshold=float(os.environ.get("CONVOMAP_EDGE_THRESHOLD", "0.5")),
            seed=int(os.environ.get("CONVOMAP_SEED", "0")),
        )


class Engine:
    """Single entry point for every conversation operation.

    Writers (analyze, ask) serialize on a per-conversation lock; provider
    calls run outside persistence so a failure discards all partial work.
    """

    def __init__(self, config: ServiceConfig | None = None):
        self.config = config or ServiceConfig.from_env()
        self.store = Store(self.config.store_path)
        if self.config.provider == "offline":
            self.embedder = OfflineEmbeddingProvider(self.config.dimension)
            self.llm = topics.OfflineLlmProvider(self.config.dimension, seed=self.config.seed)
        elif self.config.provider == "remote":
            self.embedder = RemoteEmbeddingProvider(cache=self.store.cache)
            self.llm = topics.RemoteLlmProvider(cache=self.store.cache)
        else:
            raise ArgumentError(f"unknown provider mode {self.config.provider!r}")
        self.topic_config = topics.TopicConfig(
            membership_threshold=self.config.membership_threshold
        )
        self.store.record_providers(
            embedding_provider=self.embedder.name,
            embedding_dimension=self.embedder.dimension,
            llm_provider=self.llm.name,
            summarize_template_version=topics.PROMPT_TEMPLATE_VERSION,
            context_prompt_version=retrieval.CONTEXT_PROMPT_VERSION,
        )

    # -- writes -------------------------------------------------------------

    def ingest(self, data: bytes) -> str:
        raw = parse_export(data)
        nodes = pair_messages(raw)
        conv_id = self.store.new_conversation_id()
        now = self.store.clock()
        conv = Conversation(
            id=conv_id,
            title=raw.title,
            nodes=nodes,
            created_at=now,
            updated_at=now,
        )
        self.store.save(conv)
        return conv_id

    def _analyze_in_memory(self, conv: Conversation) -> dict[str, Any]:
        topics.build_topic_model(conv, self.llm, self.embedder, self.topic_config)
        level0 = conv.level0_topics()
        ordinal_of = {t.id: i for i, t in enumerate(level0)}
        primaries = [ordinal_of[n.primary_topic] for n in conv.nodes]
        matrix = global_layout.build_transition_matrix(primaries, len(level0))
        assignment = global_layout.solve_rows(matrix, seed=self.config.seed)
        geometry = global_layout.build_global_geometry(
            conv, assignment, self.config.token_budget
        )
        conv.updated_at = self.store.clock()
        return geometry.to_dict()

    def analyze(self, conv_id: str) -> dict[str, Any]:
        with self.store.lock(conv_id):
            conv = self.store.load(conv_id)
            geometry = self._analyze_in_memory(conv)
            self.store.save(conv, geometry)
        return {
            "conversation_id": conv_id,
            "analysis_version": conv.analysis_version,
            "topic_count": len(conv.level0_topics()),
            "subtopic_count": sum(1 for t in conv.topics if t.level == 1),
        }

    def ask(self, conv_id: str, question: str, context_node_ids: list[str]) -> dict[str, Any]:
        with self.store.lock(conv_id):
            conv = self.store.load(conv_id)
            if conv.analysis_version < 1:
                raise StateError(f"conversation {conv_id!r} must be analyzed before asking")
            pending = conv.nodes[-1] if conv.nodes and not conv.nodes[-1].answer else None
            if pending is not None and pending.question != question:
                raise StateError(
                    f"conversation {conv_id!r} has an unanswered pending question; "
                    "ask it (verbatim) before asking anything new"
                )
            bundle = retrieval.assemble_context(
                conv, question, context_node_ids, self.config.token_budget
            )
            prompt = retrieval.render_prompt(conv, bundle)
            answer = self.llm.answer(prompt)
            if pending is not None:
                # The trailing unanswered node exists precisely so this flow
                # can fill it in rather than append a duplicate question.
                node = pending
                node.answer = answer
                node.token_count = count_tokens(node.question + node.answer)
            else:
                node = ConversationNode(
                    id=f"n{len(conv.nodes)}",
                    seq_index=len(conv.nodes),
                    question=question,
                    answer=answer,
                    token_count=count_tokens(question + answer),
                )
                conv.nodes.append(node)
            geometry = self._analyze_in_memory(conv)
            self.store.save(conv, geometry)
        return {
            "answer": answer,
            "node_id": node.id,
            "analysis_version": conv.analysis_version,
        }

    # -- reads --------------------------------------------------------------

    def conversation(self, conv_id: str) -> dict[str, Any]:
        return self.store.load(conv_id).to_dict()

    def node(self, conv_id: str, node_id: str) -> dict[str, Any]:
        conv = self.store.load(conv_id)
        node = conv.node_by_id(node_id)
        if node is None:
            raise NotFoundError(f"node {node_id!r} does not exist")
        doc = node.to_dict()
        doc["analysis_version"] = conv.analysis_version
        return doc

    def topics_payload(self, conv_id: str) -> dict[str, Any]:
        conv = self.store.load(conv_id)
        return {
            "analysis_version": conv.analysis_version,
            "topics": [t.to_dict() for t in conv.topics],
        }

    def global_geometry(self, conv_id: str) -> dict[str, Any]:
        doc = self.store.load_document(conv_id)
        geometry = doc.get("geometry")
        if geometry is None:
            raise StateError(f"conversation {conv_id!r} has not been analyzed")
        geometry["analysis_version"] = doc.get("analysis_version", 0)
        return geometry

    def topic_layout(
        self,
        conv_id: str,
        topic_id: str,
        mode: str = "force",
        threshold: float | None = None,
        key: str = "time",
        seed: int | None = None,
    ) -> dict[str, Any]:
        conv = self.store.load(conv_id)
        threshold = self.config.edge_threshold if threshold is None else threshold
        graph = topic_layout.build_topic_graph(conv, topic_id, threshold)
        if mode == "force":
            result = topic_layout.force_layout(
                graph, seed=self.config.seed if seed is None else seed
            )
        elif mode == "grid":
            result = topic_layout.grid_layout(graph, order_key=key)
        else:
            raise ArgumentError(f"layout mode must be 'force' or 'grid', not {mode!r}")
        payload = topic_layout.layout_to_dict(graph, result)
        payload["topic_id"] = topic_id
        payload["threshold"] = threshold
        payload["analysis_version"] = conv.analysis_version
        return payload

    def search(
        self,
        conv_id: str,
        query: str,
        top_k: int | None = None,
        min_score: float | None = None,
    ) -> dict[str, Any]:
        conv = self.store.load(conv_id)
        hits = retrieval.semantic_search(
            conv,
            self.embedder,
            query,
            top_k=retrieval.DEFAULT_TOP_K if top_k is None else top_k,
            min_score=retrieval.DEFAULT_MIN_SCORE if min_score is None else min_score,
        )
        return {
            "analysis_version": conv.analysis_version,
            "hits": [
                {
                    "node_id": hit.node_id,
                    "score": round(hit.score, 9),
                    "highlight_level": hit.highlight_level,
                }
                for hit in hits
            ],
        }

    def keywords(self, conv_id: str, start: int, end: int, top_m: int = 20) -> dict[str, Any]:
        conv = self.store.load(conv_id)
        if not 0 <= start <= end < max(len(conv.nodes), 1):
            raise ArgumentError(
                f"range [{start}, {end}] outside the conversation's {len(conv.nodes)} nodes"
            )
        docs = [node.question + "\n" + node.answer for node in conv.nodes]
        scope = range(start, end + 1)
        keywords = retrieval.tfidf_keywords(docs, scope, top_m)
        return {
            "analysis_version": conv.analysis_version,
            "keywords": [
                {"term": kw.term, "weight": round(kw.weight, 9), "df": kw.df}
                for kw in keywords
            ],
        }

    def term_highlights(self, conv_id: str, term: str) -> dict[str, Any]:
        conv = self.store.load(conv_id)
        return {
            "analysis_version": conv.analysis_version,
            "levels": retrieval.term_frequency_highlights(term, conv.nodes),
        }

    def forgotten(self, conv_id: str, budget: int | None = None) -> dict[str, Any]:
        conv = self.store.load(conv_id)
        budget = self.config.token_budget if budget is None else budget
        counts = [node.token_count for node in conv.nodes]
        return {
            "analysis_version": conv.analysis_version,
            "budget": budget,
            "forgotten_boundary": global_layout.forgotten_boundary(counts, budget),
        }


# -- HTTP layer ---------------------------------------------------------------

_STATUS_BY_ERROR: list[tuple[type[ConvomapError], int, str]] = [
    (NotFoundError, 404, "not_found"),
    (StateError, 409, "state"),
    (ProviderError, 502, "provider"),
    (BudgetError, 400, "budget"),
    (ParseError, 400, "parse"),
    (ExportSchemaError, 400, "schema"),
    (StructuralError, 400, "structure"),
    (CapacityError, 400, "capacity"),
    (ArgumentError, 400, "argument"),
]


def _error_response(exc: ConvomapError) -> JSONResponse:
    for klass, status, name in _STATUS_BY_ERROR:
        if isinstance(exc, klass):
            body: dict[str, Any] = {"error": name, "detail": str(exc)}
            if isinstance(exc, BudgetError):
                body["overshoot"] = exc.overshoot
            return JSONResponse(status_code=status, content=body)
    return JSONResponse(status_code=500, content={"error": "internal", "detail": str(exc)})


class SearchRequest(BaseModel):
    query: str
    top_k: int | None = None
    min_score: float | None = None


class KeywordsRequest(BaseModel):
    start: int = Field(alias="from")
    end: int = Field(alias="to")
    top_m: int = 20

    model_config = {"populate_by_name": True}


class AskRequest(BaseModel):
    question: str
    context_node_ids: list[str] = Field(default_factory=list)


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    engine = Engine(config)
    app = FastAPI(title="convomap", version="0.1.0")

    # Localhost tool, no auth: let the UI be served from anywhere.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ConvomapError)
    async def handle_convomap_error(_request: Request, exc: ConvomapError) -> JSONResponse:
        return _error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(
        _request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": "validation", "detail": str(exc)})

    @app.post("/api/conversations")
    async def ingest(request: Request) -> dict[str, Any]:
        data = await request.body()
        return {"id": engine.ingest(data)}

    @app.post("/api/conversations/{conv_id}/analyze")
    def analyze(conv_id: str) -> dict[str, Any]:
        return engine.analyze(conv_id)

    @app.get("/api/conversations/{conv_id}")
    def conversation(conv_id: str) -> dict[str, Any]:
        return engine.conversation(conv_id)

    @app.get("/api/conversations/{conv_id}/layout/global")
    def layout_global(conv_id: str) -> dict[str, Any]:
        return engine.global_geometry(conv_id)

    @app.get("/api/conversations/{conv_id}/topics")
    def topics_route(conv_id: str) -> dict[str, Any]:
        return engine.topics_payload(conv_id)

    @app.get("/api/conversations/{conv_id}/topics/{topic_id}/layout")
    def topic_layout_route(
        conv_id: str,
        topic_id: str,
        mode: str = "force",
        threshold: float | None = None,
        key: str = "time",
        seed: int | None = None,
    ) -> dict[str, Any]:
        return engine.topic_layout(
            conv_id, topic_id, mode=mode, threshold=threshold, key=key, seed=seed
        )

    @app.get("/api/conversations/{conv_id}/nodes/{node_id}")
    def node(conv_id: str, node_id: str) -> dict[str, Any]:
        return engine.node(conv_id, node_id)

    @app.post("/api/conversations/{conv_id}/search")
    def search(conv_id: str, body: SearchRequest) -> dict[str, Any]:
        return engine.search(conv_id, body.query, top_k=body.top_k, min_score=body.min_score)

    @app.post("/api/conversations/{conv_id}/keywords")
    def keywords(conv_id: str, body: KeywordsRequest) -> dict[str, Any]:
        return engine.keywords(conv_id, body.start, body.end, body.top_m)

    @app.get("/api/conversations/{conv_id}/highlights")
    def highlights(conv_id: str, term: str) -> dict[str, Any]:
        return engine.term_highlights(conv_id, term)

    @app.post("/api/conversations/{conv_id}/ask")
    def ask(conv_id: str, body: AskRequest) -> dict[str, Any]:
        return engine.ask(conv_id, body.question, body.context_node_ids)

    @app.get("/api/conversations/{conv_id}/forgotten")
    def forgotten(conv_id: str, budget: int | None = None) -> dict[str, Any]:
        return engine.forgotten(conv_id, budget)

    # Serve the built web client when pointed at it (CONVOMAP_UI_DIR should
    # hold index.html plus its dist/ output).
    ui_dir = os.environ.get("CONVOMAP_UI_DIR")
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
