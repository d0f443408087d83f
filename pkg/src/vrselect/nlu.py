"""Rule-based understanding of selection commands.

A small closed grammar replaces a cloud language model: utterances are
tokenized, color/shape mentions are extracted by greedy longest match
against a lexicon, and the intent is decided by trigger phrases. Three
intents exist: Select (a verb plus at least one entity), CancelAll (a
multiword cancel phrase anywhere in the utterance, which wins over
Select), and None for everything else.

The output mirrors what a hosted intent classifier would return: the most
likely intent, the recognized entity spans, and confidence scores. The
confidences are fixed by rule (exact lexicon hit 1.0, plural-folded hit
0.8) and are informational only; nothing thresholds on them.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .scene import ColorKind, ShapeKind

Canonical = Union[ShapeKind, ColorKind]


class EntityKind(Enum):
    ORIGINAL_COLOR = "OriginalColor"
    ORIGINAL_SHAPE = "OriginalShape"


class Intent(Enum):
    SELECT = "Select"
    CANCEL_ALL = "CancelAll"
    NONE = "None"


class LexiconError(ValueError):
    """The lexicon violates one of its structural rules."""


class AmbiguousCommand(ValueError):
    """A Select names more than one distinct color or shape.

    The caller should ask the user to rephrase; resolution rules only
    cover zero or one entity of each kind.
    """

    def __init__(self, recognized_text: str, colors: list[ColorKind], shapes: list[ShapeKind]):
        self.recognized_text = recognized_text
        self.colors = colors
        self.shapes = shapes
        super().__init__(
            f"ambiguous command {recognized_text!r}: "
            f"colors={[c.value for c in colors]} shapes={[s.value for s in shapes]}"
        )


@dataclass(frozen=True)
class TokenStream:
    tokens: tuple[str, ...]
    raw: str


@dataclass(frozen=True)
class EntitySpan:
    kind: EntityKind
    surface: str
    canonical: Canonical
    token_range: tuple[int, int]  # half-open indices into the token stream
    confidence: float


@dataclass(frozen=True)
class IntentPrediction:
    intent: Intent
    confidence: float


@dataclass(frozen=True)
class CommandInterpretation:
    intent: IntentPrediction
    entities: tuple[EntitySpan, ...]
    recognized_text: str

    def color(self) -> Optional[ColorKind]:
        for e in self.entities:
            if e.kind is EntityKind.ORIGINAL_COLOR:
                return e.canonical  # type: ignore[return-value]
        return None

    def shape(self) -> Optional[ShapeKind]:
        for e in self.entities:
            if e.kind is EntityKind.ORIGINAL_SHAPE:
                return e.canonical  # type: ignore[return-value]
        return None


@dataclass
class Lexicon:
    shape_terms: dict[str, ShapeKind]
    color_terms: dict[str, ColorKind]
    select_verbs: set[str]
    cancel_phrases: set[str]
    _cancel_token_seqs: list[tuple[str, ...]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.validate()
        # Longest phrases first so greedy subsequence checks stay order-free.
        self._cancel_token_seqs = sorted(
            (tuple(p.split()) for p in self.cancel_phrases), key=len, reverse=True
        )

    def validate(self) -> None:
        for table_name, table in (("shape", self.shape_terms), ("color", self.color_terms)):
            for surface in table:
                if surface != " ".join(surface.split()) or surface != surface.lower():
                    raise LexiconError(
                        f"{table_name} surface {surface!r} must be lowercase and single-spaced"
                    )
                if len(surface.split()) > 2:
                    raise LexiconError(f"{table_name} surface {surface!r} exceeds two words")
        overlap = set(self.shape_terms) & set(self.color_terms)
        if overlap:
            raise LexiconError(f"surfaces mapping to both shape and color: {sorted(overlap)}")
        missing_shapes = set(ShapeKind) - set(self.shape_terms.values())
        missing_colors = set(ColorKind) - set(self.color_terms.values())
        if missing_shapes or missing_colors:
            raise LexiconError(
                "lexicon must name every canonical kind; missing "
                f"shapes={sorted(s.value for s in missing_shapes)} "
                f"colors={sorted(c.value for c in missing_colors)}"
            )
        for phrase in self.cancel_phrases:
            if len(phrase.split()) < 2:
                raise LexiconError(f"cancel phrase {phrase!r} must be multiword")

    def max_surface_len(self) -> int:
        lens = [len(s.split()) for s in (*self.shape_terms, *self.color_terms)]
        return max(lens)


def default_lexicon() -> Lexicon:
    """The built-in vocabulary: every palette name plus common synonyms."""
    shapes: dict[str, ShapeKind] = {s.phrase: s for s in ShapeKind}
    shapes.update(
        {
            "box": ShapeKind.CUBE,
            "block": ShapeKind.CUBE,
            "ball": ShapeKind.SPHERE,
            "orb": ShapeKind.SPHERE,
            "cuboid": ShapeKind.PYRAMID_CUBOID,
            "drum": ShapeKind.BARREL,
            "plus": ShapeKind.CROSS,
        }
    )
    colors: dict[str, ColorKind] = {c.phrase: c for c in ColorKind}
    colors.update({"violet": ColorKind.PURPLE})
    return Lexicon(
        shape_terms=shapes,
        color_terms=colors,
        select_verbs={"select", "choose", "pick", "grab", "get", "take", "highlight"},
        cancel_phrases={
            "deselect all",
            "deselect everything",
            "cancel all",
            "cancel everything",
            "cancel selection",
            "clear selection",
            "reset selection",
            "start over",
            "unselect all",
            "unselect everything",
        },
    )


_PUNCT_TABLE = str.maketrans({ch: " " for ch in string.punctuation})


def normalize(raw: str) -> TokenStream:
    """Lowercase, replace punctuation with spaces, split on whitespace."""
    cleaned = raw.lower().translate(_PUNCT_TABLE)
    return TokenStream(tokens=tuple(cleaned.split()), raw=raw)


def _fold_plural(token: str) -> list[str]:
    """Candidate singular readings of a token, 'es' strip before 's' strip."""
    out = []
    if token.endswith("es") and len(token) > 2:
        out.append(token[:-2])
    if token.endswith("s") and len(token) > 1:
        out.append(token[:-1])
    return out


def _lookup(surface_tokens: tuple[str, ...], lexicon: Lexicon) -> Optional[tuple[EntityKind, Canonical, float]]:
    """Resolve a token window to an entity, folding a trailing plural."""
    def hit(key: str) -> Optional[tuple[EntityKind, Canonical]]:
        if key in lexicon.color_terms:
            return (EntityKind.ORIGINAL_COLOR, lexicon.color_terms[key])
        if key in lexicon.shape_terms:
            return (EntityKind.ORIGINAL_SHAPE, lexicon.shape_terms[key])
        return None

    exact = hit(" ".join(surface_tokens))
    if exact is not None:
        return (*exact, 1.0)
    head = surface_tokens[:-1]
    for folded in _fold_plural(surface_tokens[-1]):
        folded_hit = hit(" ".join((*head, folded)))
        if folded_hit is not None:
            return (*folded_hit, 0.8)
    return None


def extract_entities(stream: TokenStream, lexicon: Lexicon) -> list[EntitySpan]:
    """Greedy left-to-right longest match over the token stream.

    Two-word surfaces win over their one-word prefixes, matched spans never
    overlap, and unmatched tokens are skipped silently.
    """
    tokens = stream.tokens
    max_len = lexicon.max_surface_len()
    spans: list[EntitySpan] = []
    i = 0
    while i < len(tokens):
        matched = False
        for width in range(min(max_len, len(tokens) - i), 0, -1):
            window = tokens[i : i + width]
            found = _lookup(window, lexicon)
            if found is not None:
                kind, canonical, confidence = found
                spans.append(
                    EntitySpan(
                        kind=kind,
                        surface=" ".join(window),
                        canonical=canonical,
                        token_range=(i, i + width),
                        confidence=confidence,
                    )
                )
                i += width
                matched = True
                break
        if not matched:
            i += 1
    return spans


def classify_intent(
    stream: TokenStream, entities: list[EntitySpan], lexicon: Lexicon
) -> IntentPrediction:
    """Decide the intent; cancel phrases outrank select verbs."""
    tokens = stream.tokens
    for phrase in lexicon._cancel_token_seqs:
        width = len(phrase)
        for i in range(len(tokens) - width + 1):
            if tokens[i : i + width] == phrase:
                return IntentPrediction(Intent.CANCEL_ALL, 1.0)
    has_verb = any(t in lexicon.select_verbs for t in tokens)
    if has_verb and entities:
        kinds = {e.kind for e in entities}
        return IntentPrediction(Intent.SELECT, min(1.0, 0.6 + 0.2 * len(kinds)))
    return IntentPrediction(Intent.NONE, 1.0)


def interpret(raw: str, lexicon: Optional[Lexicon] = None) -> CommandInterpretation:
    """Full pipeline: normalize, extract entities, classify, sanity-check.

    Raises :class:`AmbiguousCommand` when a Select names two different
    colors or two different shapes. CancelAll and None interpretations
    always carry zero entities.
    """
    lex = lexicon if lexicon is not None else default_lexicon()
    stream = normalize(raw)
    entities = extract_entities(stream, lex)
    prediction = classify_intent(stream, entities, lex)
    recognized = " ".join(stream.tokens)

    if prediction.intent is not Intent.SELECT:
        return CommandInterpretation(prediction, (), recognized)

    colors: list[ColorKind] = []
    shapes: list[ShapeKind] = []
    deduped: list[EntitySpan] = []
    for span in entities:
        if span.kind is EntityKind.ORIGINAL_COLOR:
            if span.canonical not in colors:
                colors.append(span.canonical)  # type: ignore[arg-type]
                deduped.append(span)
        else:
            if span.canonical not in shapes:
                shapes.append(span.canonical)  # type: ignore[arg-type]
                deduped.append(span)
    if len(colors) > 1 or len(shapes) > 1:
        raise AmbiguousCommand(recognized, colors, shapes)
    return CommandInterpretation(prediction, tuple(deduped), recognized)


# Plain-text lexicon tables: `kind<TAB>surface<TAB>canonical`, '#' comments.
# Verb and cancel rows have no canonical column value beyond "-".

def dump_lexicon(lexicon: Lexicon) -> str:
    lines = ["# kind\tsurface\tcanonical"]
    for surface in sorted(lexicon.shape_terms):
        lines.append(f"shape\t{surface}\t{lexicon.shape_terms[surface].value}")
    for surface in sorted(lexicon.color_terms):
        lines.append(f"color\t{surface}\t{lexicon.color_terms[surface].value}")
    for verb in sorted(lexicon.select_verbs):
        lines.append(f"verb\t{verb}\t-")
    for phrase in sorted(lexicon.cancel_phrases):
        lines.append(f"cancel\t{phrase}\t-")
    return "\n".join(lines) + "\n"


def load_lexicon(text: str) -> Lexicon:
    shapes: dict[str, ShapeKind] = {}
    colors: dict[str, ColorKind] = {}
    verbs: set[str] = set()
    cancels: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split("\t")
        if len(parts) != 3:
            raise LexiconError(f"line {lineno}: expected kind<TAB>surface<TAB>canonical")
        kind, surface, canonical = (p.strip() for p in parts)
        if kind == "shape":
            shapes[surface] = ShapeKind(canonical)
        elif kind == "color":
            colors[surface] = ColorKind(canonical)
        elif kind == "verb":
            verbs.add(surface)
        elif kind == "cancel":
            cancels.add(surface)
        else:
            raise LexiconError(f"line {lineno}: unknown kind {kind!r}")
    return Lexicon(shapes, colors, verbs, cancels)


def load_lexicon_file(path: str) -> Lexicon:
    with open(path, "r", encoding="utf-8") as fh:
        return load_lexicon(fh.read())
