import enum
import typing


class TokenKind(enum.IntEnum):
    """Token kinds, ordered by musical specificity (general words are the least specific, track IDs the most)."""

    GENERAL_WORD = 0
    REVIEW_WORD = 1
    TAG = 2
    ARTIST_ID = 3
    TRACK_ID = 4

    @property
    def label(self) -> str:
        return self.name.lower()

    @property
    def is_word(self) -> bool:
        return self in WORD_KINDS

    @classmethod
    def from_label(cls, label: str) -> "TokenKind":
        try:
            return cls[label.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown token kind: {label!r}")


WORD_KINDS = frozenset({TokenKind.GENERAL_WORD, TokenKind.REVIEW_WORD})

# Kinds that are never dropped by the frequency cut-off or subsampling.
PROTECTED_KINDS = frozenset({TokenKind.TAG, TokenKind.ARTIST_ID, TokenKind.TRACK_ID})


def parse_kinds(labels: typing.Iterable[str]) -> frozenset[TokenKind]:
    """Accepts full labels ("track_id") and the short forms used on the command line ("track", "artist")."""
    short_forms = {"word": TokenKind.GENERAL_WORD, "review": TokenKind.REVIEW_WORD, "artist": TokenKind.ARTIST_ID,
                   "track": TokenKind.TRACK_ID}
    kinds = set()
    for label in labels:
        key = label.strip().lower()
        kinds.add(short_forms[key] if key in short_forms else TokenKind.from_label(key))
    return frozenset(kinds)


class VocabEntry(typing.NamedTuple):
    token: str
    kind: TokenKind
    count: int
