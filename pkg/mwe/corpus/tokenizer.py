import typing


def tokenize(text: str) -> list[str]:
    """Lowercase and split on runs of whitespace. No other normalization is applied."""
    return text.lower().split()


def normalize_tag(name: str) -> str:
    """Multiword tags become a single token joined with underscores (e.g. "Deep House" -> "deep_house")."""
    return "_".join(tokenize(name))


def check_identifier(kind: str, value: str) -> str:
    """Artist and track IDs are single vocabulary tokens: non-empty, no whitespace."""
    if len(value) == 0:
        raise ValueError(f"{kind} must be non-empty")
    if any(c.isspace() for c in value):
        raise ValueError(f"{kind} must not contain whitespace: {value!r}")
    return value


class LineTokenizer:
    """Iterate over a plain-text file, yielding the tokens of each line. Blank lines are skipped."""

    def __init__(self, path: str) -> None:
        self.path = path
        self.line_num: int = 0
        self.file: typing.Optional[typing.TextIO] = None

    def __iter__(self) -> "LineTokenizer":
        if self.file is not None:
            self.file.close()
        self.file = open(self.path, "r", encoding="utf-8")
        self.line_num = 0
        return self

    def __next__(self) -> list[str]:
        if self.file is None:
            raise StopIteration

        for line in self.file:
            self.line_num += 1
            tokens = tokenize(line)
            if len(tokens) > 0:
                return tokens

        self.file.close()
        self.file = None
        raise StopIteration
