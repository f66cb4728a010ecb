"""Search-result classification: does a site document its 2FA support?

Scoring is keyword-driven with a rejection threshold. The term list and
weights are configuration (defaults below); the bundled synthetic corpus
pins the default rule's behavior. Live engine adapters exist behind a
small interface, but every test runs in corpus mode.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol, Sequence

__all__ = [
    "DEFAULT_TERMS",
    "DEFAULT_THRESHOLD",
    "ScoreConfig",
    "SpiderDoc",
    "SpiderVerdict",
    "SetComparison",
    "build_query",
    "score_document",
    "matched_terms",
    "verdict_for_domain",
    "run_spider",
    "compare_with_baseline",
    "load_corpus",
    "load_domains",
    "SearchAdapter",
    "MetasearchAdapter",
]

DEFAULT_TERMS = ("2fa", "mfa", "two-factor", "two factor", "multi-factor", "two-step")
DEFAULT_TERM_WEIGHT = 2
DEFAULT_DOMAIN_WEIGHT = 1
DEFAULT_THRESHOLD = 3


@dataclass(frozen=True)
class ScoreConfig:
    terms: tuple[str, ...] = DEFAULT_TERMS
    term_weight: int = DEFAULT_TERM_WEIGHT
    domain_weight: int = DEFAULT_DOMAIN_WEIGHT
    threshold: int = DEFAULT_THRESHOLD

    @classmethod
    def load(cls, path: str | Path) -> "ScoreConfig":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            terms=tuple(t.lower() for t in doc.get("terms", DEFAULT_TERMS)),
            term_weight=int(doc.get("termWeight", DEFAULT_TERM_WEIGHT)),
            domain_weight=int(doc.get("domainWeight", DEFAULT_DOMAIN_WEIGHT)),
            threshold=int(doc.get("threshold", DEFAULT_THRESHOLD)),
        )


@dataclass(frozen=True)
class SpiderDoc:
    domain: str
    source_engine: str
    title: str
    snippet: str
    url: str

    def __post_init__(self) -> None:
        if not self.domain:
            raise ValueError("SpiderDoc.domain must be non-empty")

    def to_json(self) -> dict:
        return {
            "domain": self.domain,
            "sourceEngine": self.source_engine,
            "title": self.title,
            "snippet": self.snippet,
            "url": self.url,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SpiderDoc":
        return cls(
            domain=doc["domain"],
            source_engine=doc.get("sourceEngine", ""),
            title=doc.get("title", ""),
            snippet=doc.get("snippet", ""),
            url=doc.get("url", ""),
        )


@dataclass(frozen=True)
class SpiderVerdict:
    domain: str
    score: int
    supports_2fa: bool
    matched_terms: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "domain": self.domain,
            "score": self.score,
            "supports2fa": self.supports_2fa,
            "matchedTerms": list(self.matched_terms),
        }


@dataclass(frozen=True)
class SetComparison:
    only_baseline: int
    only_spider: int
    intersection: int
    accuracy: float

    def to_json(self) -> dict:
        return {
            "onlyBaseline": self.only_baseline,
            "onlySpider": self.only_spider,
            "intersection": self.intersection,
            "accuracy": self.accuracy,
        }


def build_query(domain: str) -> str:
    """Search phrase used against the engines, with the domain appended."""
    if not domain:
        raise ValueError("domain must be non-empty")
    return f"2FA OR MFA website {domain}"


def matched_terms(doc: SpiderDoc, config: ScoreConfig = ScoreConfig()) -> tuple[str, ...]:
    text = f"{doc.title} {doc.snippet}".lower()
    return tuple(term for term in config.terms if term in text)


def score_document(doc: SpiderDoc, domain: str, config: ScoreConfig = ScoreConfig()) -> int:
    """Keyword score, gated on the document actually referencing the domain.

    Each configured term counts once; a document that never mentions the
    domain scores zero no matter how many terms it contains.
    """
    haystack = f"{doc.url} {doc.title} {doc.snippet}".lower()
    if domain.lower() not in haystack:
        return 0
    score = config.domain_weight
    score += config.term_weight * len(matched_terms(doc, config))
    return score


def verdict_for_domain(
    domain: str,
    docs: Sequence[SpiderDoc],
    threshold: int | None = None,
    config: ScoreConfig = ScoreConfig(),
) -> SpiderVerdict:
    """Best-document score decides; ties keep the first document."""
    threshold = config.threshold if threshold is None else threshold
    best_score = 0
    best_terms: tuple[str, ...] = ()
    for doc in docs:
        score = score_document(doc, domain, config)
        if score > best_score:
            best_score = score
            best_terms = matched_terms(doc, config)
    return SpiderVerdict(
        domain=domain,
        score=best_score,
        supports_2fa=best_score >= threshold,
        matched_terms=best_terms,
    )


def run_spider(
    docs: Iterable[SpiderDoc],
    domains: Sequence[str],
    threshold: int | None = None,
    config: ScoreConfig = ScoreConfig(),
) -> list[SpiderVerdict]:
    by_domain: dict[str, list[SpiderDoc]] = {domain: [] for domain in domains}
    for doc in docs:
        by_domain.setdefault(doc.domain, []).append(doc)
    return [
        verdict_for_domain(domain, by_domain.get(domain, []), threshold, config)
        for domain in domains
    ]


def compare_with_baseline(
    verdicts: Iterable[SpiderVerdict] | Iterable[str],
    baseline_domains: Iterable[str],
) -> SetComparison:
    """Set algebra between spider positives and a directory baseline."""
    spider: set[str] = set()
    for item in verdicts:
        if isinstance(item, SpiderVerdict):
            if item.supports_2fa:
                spider.add(item.domain)
        else:
            spider.add(item)
    baseline = set(baseline_domains)
    intersection = len(baseline & spider)
    return SetComparison(
        only_baseline=len(baseline - spider),
        only_spider=len(spider - baseline),
        intersection=intersection,
        accuracy=(intersection / len(baseline)) if baseline else 0.0,
    )


def load_corpus(path: str | Path) -> list[SpiderDoc]:
    """Read a JSONL corpus, one SpiderDoc per line."""
    docs = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                docs.append(SpiderDoc.from_json(json.loads(line)))
    return docs


def load_domains(path: str | Path) -> list[str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [line.strip() for line in lines if line.strip() and not line.startswith("#")]


class SearchAdapter(Protocol):
    def search(self, query: str) -> list[SpiderDoc]: ...


class MetasearchAdapter:
    """Adapter for a self-hosted metasearch endpoint with a JSON API.

    Expects the conventional ``/search?q=...&format=json`` shape and maps
    each result to a SpiderDoc. Only used in live mode; corpus mode never
    touches the network.
    """

    def __init__(self, endpoint: str, engines: str = "google,bing,yandex,yahoo", timeout: float = 15.0):
        self.endpoint = endpoint.rstrip("/")
        self.engines = engines
        self.timeout = timeout

    def search(self, query: str, domain: str = "") -> list[SpiderDoc]:
        import requests

        response = requests.get(
            f"{self.endpoint}/search",
            params={"q": query, "format": "json", "engines": self.engines},
            timeout=self.timeout,
        )
        response.raise_for_status()
        payload = response.json()
        docs = []
        for result in payload.get("results", []):
            docs.append(
                SpiderDoc(
                    domain=domain or result.get("parsed_url", [""])[1] or "unknown",
                    source_engine=result.get("engine", ""),
                    title=result.get("title", ""),
                    snippet=result.get("content", ""),
                    url=result.get("url", ""),
                )
            )
        return docs
