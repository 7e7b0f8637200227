"""Communication analytics: entities, checklist adherence and WER.

All matching runs over a shared normalization (lowercase, the punctuation
set ``.,?!;:'"-`` collapsed to single spaces) so that transcript variants
like "berth,"/"berth" compare equal while real word substitutions count.
Entity extraction is a gazetteer matcher: longest alias first, left to
right, on token boundaries. Checklist judging is keyword-rule based, with
an adapter seam for an external judge backend.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import (
    AdapterTimeout,
    AdapterUnavailable,
    ChecklistEventMismatch,
    EmptyReference,
    MalformedAdapterResponse,
    SchemaError,
)
from .model import TriggerEvent, Utterance

_PUNCT = set(".,?!;:'\"-")

INTERNAL = "internal"
EXTERNAL = "external"


# -- normalization ------------------------------------------------------------

def normalize_text(text: str) -> tuple[str, list[int]]:
    """Normalized text plus a map from normalized index to original index."""
    chars: list[str] = []
    offsets: list[int] = []
    run_start: Optional[int] = None  # first original index of a separator run
    for i, ch in enumerate(text):
        if ch in _PUNCT or ch.isspace():
            if run_start is None:
                run_start = i
            continue
        if run_start is not None and chars:
            chars.append(" ")
            offsets.append(run_start)
        run_start = None
        for low in ch.lower():
            chars.append(low)
            offsets.append(i)
    return "".join(chars), offsets


def tokenize(text: str) -> list[str]:
    norm, _ = normalize_text(text)
    return norm.split(" ") if norm else []


# -- entity lexicon and extraction ---------------------------------------------

@dataclass(frozen=True)
class EntityEntry:
    name: str
    category: str  # "internal" | "external"
    aliases: tuple[str, ...] = ()


@dataclass(frozen=True)
class EntityLexicon:
    entries: tuple[EntityEntry, ...]

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            if not e.name:
                raise ValueError("entity name must be non-empty")
            if e.name in seen:
                raise ValueError(f"duplicate entity name '{e.name}'")
            seen.add(e.name)
            if e.category not in (INTERNAL, EXTERNAL):
                raise ValueError(f"entity '{e.name}': category must be internal or external")
            for alias in e.aliases:
                if not alias.strip():
                    raise ValueError(f"entity '{e.name}': empty alias")

    def category_of(self, name: str) -> str:
        for e in self.entries:
            if e.name == name:
                return e.category
        raise KeyError(name)


@dataclass(frozen=True)
class EntityMention:
    utterance_index: int
    start: int  # char offsets in normalized text
    end: int
    name: str
    category: str


def _alias_index(lexicon: EntityLexicon) -> dict[str, list[tuple[tuple[str, ...], EntityEntry]]]:
    """First-token index of normalized alias token sequences, longest first."""
    index: dict[str, list[tuple[tuple[str, ...], EntityEntry]]] = {}
    for entry in lexicon.entries:
        for surface in (entry.name, *entry.aliases):
            toks = tuple(tokenize(surface))
            if not toks:
                continue
            index.setdefault(toks[0], []).append((toks, entry))
    for candidates in index.values():
        candidates.sort(key=lambda c: (-len(c[0]), -sum(len(t) for t in c[0]), c[1].name))
    return index


def extract_entities(
    utterance: Union[Utterance, str], lexicon: EntityLexicon, utterance_index: int = 0
) -> list[EntityMention]:
    """Gazetteer mentions in one utterance, spans in normalized text."""
    text = utterance.text if isinstance(utterance, Utterance) else utterance
    norm, _ = normalize_text(text)
    if not norm:
        return []
    tokens = norm.split(" ")
    starts: list[int] = []
    pos = 0
    for tok in tokens:
        starts.append(pos)
        pos += len(tok) + 1

    index = _alias_index(lexicon)
    mentions: list[EntityMention] = []
    i = 0
    while i < len(tokens):
        best: Optional[tuple[int, EntityEntry]] = None
        for toks, entry in index.get(tokens[i], ()):
            if tuple(tokens[i : i + len(toks)]) == toks:
                best = (len(toks), entry)
                break  # candidates are longest-first
        if best is None:
            i += 1
            continue
        length, entry = best
        start = starts[i]
        end = starts[i + length - 1] + len(tokens[i + length - 1])
        mentions.append(
            EntityMention(
                utterance_index=utterance_index,
                start=start,
                end=end,
                name=entry.name,
                category=entry.category,
            )
        )
        i += length
    return mentions


@dataclass(frozen=True)
class EntityCount:
    name: str
    category: str
    count: int


@dataclass(frozen=True)
class EntitySummary:
    per_entity: tuple[EntityCount, ...]
    per_category: dict[str, int]
    total_mentions: int


def entity_summary(session_or_utterances, lexicon: EntityLexicon) -> EntitySummary:
    """Mention counts per entity and per category over a transcript.

    Accepts a Session or a plain utterance sequence. Ordering is
    deterministic: category, then descending count, then name.
    """
    utterances = getattr(session_or_utterances, "utterances", session_or_utterances)
    counts: dict[str, int] = {}
    for i, utt in enumerate(utterances):
        for mention in extract_entities(utt, lexicon, utterance_index=i):
            counts[mention.name] = counts.get(mention.name, 0) + 1

    per_entity = [
        EntityCount(name=name, category=lexicon.category_of(name), count=count)
        for name, count in counts.items()
    ]
    per_entity.sort(key=lambda c: (c.category, -c.count, c.name))
    per_category = {EXTERNAL: 0, INTERNAL: 0}
    for c in per_entity:
        per_category[c.category] += c.count
    return EntitySummary(
        per_entity=tuple(per_entity),
        per_category=per_category,
        total_mentions=sum(counts.values()),
    )


# -- checklist judging ----------------------------------------------------------

@dataclass(frozen=True)
class ChecklistItem:
    item_id: str
    description: str
    all_of: tuple[tuple[str, ...], ...]  # every group must contribute one alias
    horizon_ms: Optional[int] = None


@dataclass(frozen=True)
class ChecklistDefinition:
    event_kind: str
    items: tuple[ChecklistItem, ...]

    def __post_init__(self):
        seen = set()
        for item in self.items:
            if item.item_id in seen:
                raise ValueError(f"duplicate checklist item id '{item.item_id}'")
            seen.add(item.item_id)
            if not item.all_of or any(not group for group in item.all_of):
                raise ValueError(f"item '{item.item_id}': every all_of group must be non-empty")


@dataclass(frozen=True)
class Evidence:
    utterance_index: Optional[int] = None
    matched_terms: tuple[str, ...] = ()
    note: str = ""


@dataclass(frozen=True)
class ChecklistResult:
    item_id: str
    completed: bool
    evidence: Optional[Evidence] = None
    uncertain: bool = False


def _contains_phrase(tokens: Sequence[str], phrase: Sequence[str]) -> bool:
    if not phrase or len(phrase) > len(tokens):
        return False
    first = phrase[0]
    for i in range(len(tokens) - len(phrase) + 1):
        if tokens[i] == first and list(tokens[i : i + len(phrase)]) == list(phrase):
            return True
    return False


def judge_checklist(
    checklist: ChecklistDefinition,
    utterances: Sequence[Utterance],
    event: TriggerEvent,
    horizon_ms: int,
) -> list[ChecklistResult]:
    """Rule-based reference judgement of checklist completion.

    An item completes iff some utterance starting inside the event horizon
    contains at least one alias from every all_of group; the first such
    utterance is recorded as evidence.
    """
    if checklist.event_kind != event.kind:
        raise ChecklistEventMismatch(
            f"checklist is for '{checklist.event_kind}', event is '{event.kind}'"
        )
    results = []
    for item in checklist.items:
        horizon = item.horizon_ms if item.horizon_ms is not None else horizon_ms
        completed = False
        evidence = None
        for idx, utt in enumerate(utterances):
            if not event.t_ms <= utt.t0_ms <= event.t_ms + horizon:
                continue
            tokens = tokenize(utt.text)
            matched: list[str] = []
            for group in item.all_of:
                hit = next((a for a in group if _contains_phrase(tokens, tokenize(a))), None)
                if hit is None:
                    matched = []
                    break
                matched.append(hit)
            if matched:
                completed = True
                evidence = Evidence(utterance_index=idx, matched_terms=tuple(matched))
                break
        results.append(ChecklistResult(item_id=item.item_id, completed=completed, evidence=evidence))
    return results


class JudgeAdapter:
    """Interface for an external checklist-judging backend."""

    def judge(
        self, checklist: ChecklistDefinition, utterances: Sequence[Utterance], event: TriggerEvent
    ) -> list[ChecklistResult]:
        raise NotImplementedError


class RuleJudge(JudgeAdapter):
    """Built-in reference backend wrapping judge_checklist."""

    def __init__(self, horizon_ms: int):
        self.horizon_ms = horizon_ms

    def judge(self, checklist, utterances, event):
        return judge_checklist(checklist, utterances, event, self.horizon_ms)


def normalize_adapter_response(
    checklist: ChecklistDefinition, response: Sequence[dict]
) -> list[ChecklistResult]:
    """Validate a wire response and coerce it into checklist item order.

    Unknown item ids are malformed; items the backend left out come back as
    not-completed with the uncertain flag set, as does a null verdict.
    """
    known = {item.item_id for item in checklist.items}
    by_id: dict[str, ChecklistResult] = {}
    for i, raw in enumerate(response):
        if not isinstance(raw, dict) or "item_id" not in raw:
            raise MalformedAdapterResponse(f"response[{i}] is not an item object")
        item_id = raw["item_id"]
        if item_id not in known:
            raise MalformedAdapterResponse(f"unknown item_id '{item_id}'")
        completed = raw.get("completed")
        if completed is not None and not isinstance(completed, bool):
            raise MalformedAdapterResponse(f"item '{item_id}': completed must be boolean or null")
        note = raw.get("evidence")
        if note is not None and not isinstance(note, str):
            raise MalformedAdapterResponse(f"item '{item_id}': evidence must be a string or null")
        by_id[item_id] = ChecklistResult(
            item_id=item_id,
            completed=bool(completed),
            evidence=Evidence(note=note) if note else None,
            uncertain=completed is None,
        )
    return [
        by_id.get(item.item_id, ChecklistResult(item_id=item.item_id, completed=False, uncertain=True))
        for item in checklist.items
    ]


def judge_with_fallback(
    adapter: Optional[JudgeAdapter],
    checklist: ChecklistDefinition,
    utterances: Sequence[Utterance],
    event: TriggerEvent,
    horizon_ms: int,
) -> list[ChecklistResult]:
    """Use the configured adapter when possible, else the rule backend."""
    if adapter is not None:
        try:
            return adapter.judge(checklist, utterances, event)
        except (AdapterUnavailable, AdapterTimeout):
            pass
    return judge_checklist(checklist, utterances, event, horizon_ms)


# -- word error rate -------------------------------------------------------------

@dataclass(frozen=True)
class WerResult:
    substitutions: int
    deletions: int
    insertions: int
    ref_token_count: int

    @property
    def wer(self) -> float:
        return (self.substitutions + self.deletions + self.insertions) / self.ref_token_count


def word_error_rate(reference: str, hypothesis: str) -> WerResult:
    """Minimal-edit WER over normalized whitespace tokens.

    Unit costs; when multiple alignments are optimal the backtrace prefers
    substitution over insertion over deletion, making S/D/I deterministic.
    """
    ref = tokenize(reference)
    hyp = tokenize(hypothesis)
    if not ref:
        raise EmptyReference("reference is empty after normalization")

    r, h = len(ref), len(hyp)
    dist = [[0] * (h + 1) for _ in range(r + 1)]
    for i in range(1, r + 1):
        dist[i][0] = i
    for j in range(1, h + 1):
        dist[0][j] = j
    for i in range(1, r + 1):
        row, prev = dist[i], dist[i - 1]
        for j in range(1, h + 1):
            cost = 0 if ref[i - 1] == hyp[j - 1] else 1
            row[j] = min(prev[j - 1] + cost, row[j - 1] + 1, prev[j] + 1)

    subs = ins = dels = 0
    i, j = r, h
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            cost = 0 if ref[i - 1] == hyp[j - 1] else 1
            if dist[i][j] == dist[i - 1][j - 1] + cost:
                subs += cost
                i -= 1
                j -= 1
                continue
        if j > 0 and dist[i][j] == dist[i][j - 1] + 1:
            ins += 1
            j -= 1
            continue
        dels += 1
        i -= 1

    return WerResult(substitutions=subs, deletions=dels, insertions=ins, ref_token_count=r)


# -- file loaders ------------------------------------------------------------------

def load_lexicon(source) -> EntityLexicon:
    """Parse entities.json: [{"name", "aliases", "category"}]."""
    import json

    doc = json.loads(source.decode("utf-8") if isinstance(source, bytes) else source)
    if not isinstance(doc, list):
        raise SchemaError("entities", "expected an array")
    entries = []
    for i, obj in enumerate(doc):
        path = f"entities[{i}]"
        if not isinstance(obj, dict):
            raise SchemaError(path, "expected an object")
        name = obj.get("name")
        if not isinstance(name, str) or not name:
            raise SchemaError(f"{path}.name", "must be a non-empty string")
        category = obj.get("category")
        if category not in (INTERNAL, EXTERNAL):
            raise SchemaError(f"{path}.category", "must be 'internal' or 'external'")
        aliases = obj.get("aliases", [])
        if not isinstance(aliases, list) or any(not isinstance(a, str) or not a.strip() for a in aliases):
            raise SchemaError(f"{path}.aliases", "must be non-empty strings")
        entries.append(EntityEntry(name=name, category=category, aliases=tuple(aliases)))
    try:
        return EntityLexicon(entries=tuple(entries))
    except ValueError as exc:
        raise SchemaError("entities", str(exc)) from exc


def _checklist_from_doc(doc: dict, path: str) -> ChecklistDefinition:
    kind = doc.get("event_kind")
    if not isinstance(kind, str) or not kind:
        raise SchemaError(f"{path}.event_kind", "must be a non-empty string")
    items_doc = doc.get("items")
    if not isinstance(items_doc, list) or not items_doc:
        raise SchemaError(f"{path}.items", "must be a non-empty array")
    items = []
    for i, obj in enumerate(items_doc):
        ipath = f"{path}.items[{i}]"
        if not isinstance(obj, dict):
            raise SchemaError(ipath, "expected an object")
        item_id = obj.get("id")
        if not isinstance(item_id, str) or not item_id:
            raise SchemaError(f"{ipath}.id", "must be a non-empty string")
        description = obj.get("description", "")
        match = obj.get("match")
        if not isinstance(match, dict) or not isinstance(match.get("all_of"), list):
            raise SchemaError(f"{ipath}.match.all_of", "must be an array of alias groups")
        groups = []
        for g, group in enumerate(match["all_of"]):
            if (
                not isinstance(group, list)
                or not group
                or any(not isinstance(a, str) or not a.strip() for a in group)
            ):
                raise SchemaError(f"{ipath}.match.all_of[{g}]", "must be non-empty strings")
            groups.append(tuple(group))
        horizon = obj.get("horizon_ms")
        if horizon is not None and (isinstance(horizon, bool) or not isinstance(horizon, int) or horizon <= 0):
            raise SchemaError(f"{ipath}.horizon_ms", "must be a positive integer")
        items.append(
            ChecklistItem(
                item_id=item_id,
                description=str(description),
                all_of=tuple(groups),
                horizon_ms=horizon,
            )
        )
    try:
        return ChecklistDefinition(event_kind=kind, items=tuple(items))
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from exc


def load_checklists(source) -> list[ChecklistDefinition]:
    """Parse a checklist file: one definition object or an array of them."""
    import json

    doc = json.loads(source.decode("utf-8") if isinstance(source, bytes) else source)
    if isinstance(doc, dict):
        return [_checklist_from_doc(doc, "checklist")]
    if isinstance(doc, list):
        return [_checklist_from_doc(d, f"checklists[{i}]") for i, d in enumerate(doc)]
    raise SchemaError("checklists", "expected an object or array")
