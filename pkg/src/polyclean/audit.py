"""HTTP service for the per-language self-audit loop.

Serves seeded document samples per language, records human verdicts
(append-only JSON Lines log), and exports the latest decision per
language in the format the pipeline's audit gate consumes. State on disk
is the corpus file plus the verdict log; restarts lose nothing.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import random
import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .core import Document, canon, normalize_lang_code, read_jsonl
from .datafiles import load_guidelines
from .tokenizers import stable_hash

DECISIONS = ("keep", "filter-note", "remove", "rename", "merge")
ISSUE_TAGS = ("bible", "jw", "lds", "virama", "short_docs", "noise", "porn", "boilerplate")
SAMPLE_SIZE = 20


class VerdictIn(BaseModel):
    lang: str
    decision: str
    target: str | None = None
    issues: list[str] = Field(default_factory=list)
    notes: str = ""
    auditor: str = "anonymous"


class CorpusIndex:
    def __init__(self, corpus_path: str):
        self.path = corpus_path
        self.docs: dict[str, Document] = {}
        self.by_lang: dict[str, list[str]] = {}
        self.display: dict[str, str] = {}
        for doc in read_jsonl(corpus_path):
            self.docs[doc.id] = doc
            key = canon(doc.lang)
            self.by_lang.setdefault(key, []).append(doc.id)
            self.display.setdefault(key, doc.lang.code)
        self.digest = hashlib.sha256(Path(corpus_path).read_bytes()).hexdigest()


class VerdictLog:
    """Append-only JSONL store; the newest verdict per language wins."""

    def __init__(self, path: str):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._entries: list[dict] = []
        if self.path.exists():
            with open(self.path, encoding="utf-8") as f:
                self._entries = [json.loads(l) for l in f if l.strip()]

    def append(self, entry: dict) -> int:
        with self._lock:
            entry = dict(entry, verdict_id=len(self._entries))
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(json.dumps(entry, ensure_ascii=False, sort_keys=True) + "\n")
            self._entries.append(entry)
            return entry["verdict_id"]

    def export(self) -> dict[str, dict]:
        out: dict[str, dict] = {}
        for entry in self._entries:
            out[entry["lang"]] = {
                "decision": entry["decision"],
                "target": entry.get("target"),
                "issues": entry.get("issues", []),
                "notes": entry.get("notes", ""),
            }
        return out


def _doc_payload(doc: Document) -> dict:
    return {
        "id": doc.id,
        "lang": doc.lang.code,
        "text": doc.text,
        "url": doc.source_url,
    }


def create_app(corpus_path: str, verdicts_path: str) -> FastAPI:
    app = FastAPI(title="polyclean audit service")
    index = CorpusIndex(corpus_path)
    log = VerdictLog(verdicts_path)

    @app.get("/languages")
    def languages():
        export = log.export()
        rows = []
        for key, ids in index.by_lang.items():
            verdict = export.get(key)
            rows.append(
                {
                    "lang": index.display[key],
                    "doc_count": len(ids),
                    "audited": verdict is not None,
                    "decision": verdict["decision"] if verdict else None,
                }
            )
        rows.sort(key=lambda r: (-r["doc_count"], r["lang"]))
        return rows

    @app.get("/sample")
    def sample(lang: str, n: int = SAMPLE_SIZE, seed: int = 0):
        key = canon(lang)
        ids = index.by_lang.get(key)
        if ids is None:
            raise HTTPException(404, f"unknown language: {lang}")
        rng = random.Random(stable_hash(index.digest, key, seed))
        k = min(n, len(ids))
        chosen = rng.sample(ids, k)
        return {
            "lang": index.display[key],
            "sample_seed": seed,
            "documents": [_doc_payload(index.docs[i]) for i in chosen],
        }

    @app.get("/doc")
    def doc(id: str):
        if id not in index.docs:
            raise HTTPException(404, f"unknown document: {id}")
        return _doc_payload(index.docs[id])

    @app.get("/guidelines")
    def guidelines():
        return {"guidelines": load_guidelines()}

    @app.get("/taxonomy")
    def taxonomy():
        return {"decisions": list(DECISIONS), "issues": list(ISSUE_TAGS)}

    @app.post("/verdict")
    def verdict(body: VerdictIn):
        key = canon(body.lang)
        if key not in index.by_lang:
            raise HTTPException(404, f"unknown language: {body.lang}")
        if body.decision not in DECISIONS:
            raise HTTPException(400, f"invalid decision: {body.decision}")
        bad = [i for i in body.issues if i not in ISSUE_TAGS]
        if bad:
            raise HTTPException(400, f"invalid issue tags: {bad}")
        target = None
        if body.decision in ("rename", "merge"):
            if not body.target:
                raise HTTPException(400, f"{body.decision} requires a target code")
            try:
                target = normalize_lang_code(body.target).code
            except ValueError as exc:
                raise HTTPException(400, str(exc)) from exc
        elif body.target:
            raise HTTPException(400, "target only valid for rename/merge")
        entry = {
            "lang": key,
            "decision": body.decision,
            "target": target,
            "issues": sorted(set(body.issues)),
            "notes": body.notes,
            "auditor": body.auditor,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        }
        verdict_id = log.append(entry)
        return {"verdict_id": verdict_id, "lang": key}

    @app.get("/export")
    def export():
        return log.export()

    return app


def serve(corpus_path: str, verdicts_path: str, listen: str = "127.0.0.1:8765"):
    import uvicorn

    host, _, port = listen.rpartition(":")
    uvicorn.run(
        create_app(corpus_path, verdicts_path),
        host=host or "127.0.0.1",
        port=int(port),
        log_level="warning",
    )
