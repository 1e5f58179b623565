"""File parsers: triple files, patent-record files, group universes.

Triple file, one fact per line, tab-separated:

    <head_kind>:<head_id>\t<relation>\t<tail_kind>:<tail_id>

e.g. ``inventor:4074775\twrite\tpatent:5252504``. Kind and relation
tokens are lowercase and exact; lines starting with `#` are comments.
Ingestion deduplicates repeated facts silently and drops self-citations
and lines with missing endpoints, logging the counts; anything else
malformed raises ParseError with the line number.

Patent-record file, tab-separated:

    patent_id\tYYYY-MM-DD\tgroup1,group2,...\tinventor1,...\tassignee1,...

Empty inventor/assignee fields are allowed; such records are simply
excluded from that agent kind's portfolios.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from datetime import date
from pathlib import Path

from .errors import MalformedCode, ParseError
from .graph import EntityKind, RelationKind, Triple, TripleStore, Vocabulary

log = logging.getLogger(__name__)

_KIND_TOKENS = {k.value: k for k in EntityKind}
_RELATION_TOKENS = {r.value: r for r in RelationKind}
_GROUP_PREFIX = re.compile(r"^[A-Za-z][0-9][0-9][A-Za-z]")


def _parse_entity_token(token: str, line_no: int) -> tuple[EntityKind, str]:
    kind_text, sep, source_id = token.partition(":")
    if not sep:
        raise ParseError(f"line {line_no}: entity token {token!r} lacks ':'")
    kind = _KIND_TOKENS.get(kind_text)
    if kind is None:
        raise ParseError(f"line {line_no}: unknown entity kind {kind_text!r}")
    return kind, source_id


def parse_triples_file(path, vocab: Vocabulary | None = None) -> TripleStore:
    """Parse a triple file into a store, assigning ordinals first-seen.

    Passing a pre-built vocabulary (e.g. from a `.vocab` sidecar) pins
    the ordinal assignment regardless of triple order.
    """
    store = TripleStore(vocab)
    dropped_self_cites = 0
    dropped_missing = 0
    duplicates = 0
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError(f"line {line_no}: expected 3 tab-separated fields, got {len(parts)}")
            head_kind, head_id = _parse_entity_token(parts[0], line_no)
            relation = _RELATION_TOKENS.get(parts[1])
            if relation is None:
                raise ParseError(f"line {line_no}: unknown relation {parts[1]!r}")
            tail_kind, tail_id = _parse_entity_token(parts[2], line_no)
            if not head_id or not tail_id:
                dropped_missing += 1
                continue
            head = store.add_entity(head_kind, head_id)
            tail = store.add_entity(tail_kind, tail_id)
            if relation is RelationKind.CITE and head.ordinal == tail.ordinal:
                dropped_self_cites += 1
                continue
            triple = Triple(head.ordinal, relation, tail.ordinal)
            if triple in store:
                duplicates += 1
                continue
            try:
                store.add_triple(triple)
            except Exception as exc:
                raise type(exc)(f"line {line_no}: {exc}") from None
    if dropped_self_cites or dropped_missing or duplicates:
        log.info(
            "%s: dropped %d self-citations, %d missing-endpoint lines, %d duplicates",
            path, dropped_self_cites, dropped_missing, duplicates,
        )
    return store


def subsection_of(group_code: str) -> str:
    """Parent subsection code: the first 3 characters of the group code."""
    if len(group_code) < 4:
        raise MalformedCode(f"group code {group_code!r} shorter than 4 characters")
    return group_code[:3]


def derive_comprise(store: TripleStore, groups: set[str]) -> list[Triple]:
    """Add one <subsection, comprise, group> triple per group code.

    Subsection entities are created on demand; already-present triples
    are skipped, so the derivation is idempotent.
    """
    added: list[Triple] = []
    for code in sorted(groups):
        sub = store.add_entity(EntityKind.SUBSECTION, subsection_of(code))
        grp = store.add_entity(EntityKind.GROUP, code)
        triple = Triple(sub.ordinal, RelationKind.COMPRISE, grp.ordinal)
        if triple not in store:
            store.add_triple(triple)
            added.append(triple)
    return added


@dataclass(frozen=True, slots=True)
class PatentRecord:
    patent_id: str
    application_date: date
    groups: frozenset[str]
    inventors: frozenset[str]
    assignees: frozenset[str]


@dataclass(slots=True)
class AgentPortfolio:
    """Chronologically ordered patent events of one inventor or assignee."""

    agent_id: str
    agent_kind: EntityKind
    records: list[PatentRecord]

    def __len__(self) -> int:
        return len(self.records)


def _validate_group_code(code: str, line_no: int) -> str:
    if len(code) < 4 or not _GROUP_PREFIX.match(code):
        raise ParseError(
            f"line {line_no}: group code {code!r} must be >=4 chars "
            "with a letter-digit-digit-letter prefix"
        )
    return code


def parse_patent_records(path) -> list[PatentRecord]:
    """Parse a patent-record file, first occurrence winning on duplicate ids."""
    records: list[PatentRecord] = []
    seen: set[str] = set()
    duplicates = 0
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise ParseError(f"line {line_no}: expected 5 tab-separated fields, got {len(parts)}")
            patent_id, date_text, groups_text, inventors_text, assignees_text = parts
            if not patent_id:
                raise ParseError(f"line {line_no}: empty patent id")
            try:
                application_date = date.fromisoformat(date_text)
            except ValueError:
                raise ParseError(f"line {line_no}: bad date {date_text!r}") from None
            groups = [g for g in groups_text.split(",") if g]
            if not groups:
                raise ParseError(f"line {line_no}: patent {patent_id} has no groups")
            for g in groups:
                _validate_group_code(g, line_no)
            if patent_id in seen:
                duplicates += 1
                continue
            seen.add(patent_id)
            records.append(
                PatentRecord(
                    patent_id=patent_id,
                    application_date=application_date,
                    groups=frozenset(groups),
                    inventors=frozenset(i for i in inventors_text.split(",") if i),
                    assignees=frozenset(a for a in assignees_text.split(",") if a),
                )
            )
    if duplicates:
        log.info("%s: skipped %d duplicate patent ids", path, duplicates)
    return records


def load_portfolios(path, agent_kind: EntityKind, min_patents: int = 1) -> list[AgentPortfolio]:
    """One portfolio per agent holding >= min_patents records.

    Events are sorted by application date, ties broken by patent id, so
    the ordering is a total order and re-sorting is a no-op. Portfolios
    come back sorted by agent id.
    """
    if agent_kind not in (EntityKind.INVENTOR, EntityKind.ASSIGNEE):
        raise ValueError("agent_kind must be INVENTOR or ASSIGNEE")
    records = parse_patent_records(path)
    by_agent: dict[str, list[PatentRecord]] = {}
    for record in records:
        agents = record.inventors if agent_kind is EntityKind.INVENTOR else record.assignees
        for agent_id in agents:
            by_agent.setdefault(agent_id, []).append(record)
    portfolios = []
    for agent_id in sorted(by_agent):
        events = sorted(by_agent[agent_id], key=lambda r: (r.application_date, r.patent_id))
        if len(events) >= min_patents:
            portfolios.append(AgentPortfolio(agent_id, agent_kind, events))
    return portfolios


def load_universe(path) -> list[str]:
    """Ordered, unique group codes admissible in the expansion study."""
    codes: list[str] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            code = line.strip()
            if not code or code.startswith("#"):
                continue
            _validate_group_code(code, line_no)
            if code in seen:
                raise ParseError(f"line {line_no}: duplicate group code {code!r}")
            seen.add(code)
            codes.append(code)
    return codes


def write_triples_file(store: TripleStore, path) -> None:
    """Canonical TSV export in stored order plus a `.vocab` sidecar."""
    lines = []
    for t in store.triples:
        head = store.vocab.refs[t.head]
        tail = store.vocab.refs[t.tail]
        lines.append(
            f"{head.kind.value}:{head.source_id}\t{t.relation.value}\t"
            f"{tail.kind.value}:{tail.source_id}"
        )
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    vocab_lines = store.vocab.export_lines()
    Path(f"{path}.vocab").write_text(
        "\n".join(vocab_lines) + ("\n" if vocab_lines else ""), encoding="utf-8"
    )


def load_store(path) -> TripleStore:
    """Read a triple file, honouring a `.vocab` sidecar when present."""
    sidecar = Path(f"{path}.vocab")
    vocab = Vocabulary.from_lines(sidecar.read_text(encoding="utf-8").splitlines()) if sidecar.exists() else None
    return parse_triples_file(path, vocab)
