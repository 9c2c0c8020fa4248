"""Text formats: ``.sos`` for spaces of orderings and ``.cgp`` for presentations."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .f2algebra import DIM_LIMIT
from .orderspace import SpaceError, SpaceOfOrderings, normalize

Word = tuple[tuple[int, int], ...]  # (generator index from 0, exponent 1..3)

GENS_LIMIT = 16


class FormatError(ValueError):
    """Malformed input; carries a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int = 1, source: str | None = None):
        self.line, self.column, self.source = line, column, source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{column}: {message}")


def _lines(text: str):
    """Yield (line number, column offset, content) for non-blank lines, comments stripped."""
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        stripped = body.lstrip()
        if stripped:
            yield no, len(body) - len(stripped) + 1, stripped


def _header(lines, magic: str, key: str, limit: int, source):
    try:
        no, col, head = next(lines)
    except StopIteration:
        raise FormatError(f"empty file, expected '{magic} 1'", 1, 1, source) from None
    if head.split() != [magic, "1"]:
        raise FormatError(f"expected '{magic} 1'", no, col, source)
    try:
        no, col, line = next(lines)
    except StopIteration:
        raise FormatError(f"missing '{key} <n>' line", no + 1, 1, source) from None
    parts = line.split()
    if len(parts) != 2 or parts[0] != key or not parts[1].isdigit():
        raise FormatError(f"expected '{key} <n>'", no, col, source)
    value = int(parts[1])
    if not 1 <= value <= limit:
        raise FormatError(f"{key} must be between 1 and {limit}", no, col + len(key) + 1, source)
    return value


# -- .sos ---------------------------------------------------------------------------

def parse_sos(text: str, source: str | None = None) -> SpaceOfOrderings:
    lines = _lines(text)
    dim = _header(lines, "sos", "dim", DIM_LIMIT, source)
    name = None
    chars: list[int] = []
    seen: dict[int, int] = {}
    last = 2
    for no, col, line in lines:
        last = no
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "name":
            if name is not None:
                raise FormatError("duplicate name line", no, col, source)
            if chars:
                raise FormatError("name must precede the char lines", no, col, source)
            name = rest
            continue
        if key != "char":
            raise FormatError(f"unexpected keyword {key!r}", no, col, source)
        vcol = col + line.index(rest) if rest else col + len(line)
        if len(rest) != dim:
            raise FormatError(f"character must have {dim} symbols, got {len(rest)}", no, vcol, source)
        for k, sym in enumerate(rest):
            if sym not in "+-":
                raise FormatError(f"invalid symbol {sym!r}, expected '+' or '-'", no, vcol + k, source)
        if rest[0] != "-":
            raise FormatError("first symbol must be '-' (the character is -1 on b1)", no, vcol, source)
        s = int(rest.replace("-", "1").replace("+", "0"), 2)
        if s in seen:
            raise FormatError(f"duplicate character (first seen on line {seen[s]})", no, vcol, source)
        seen[s] = no
        chars.append(s)
    if not chars:
        raise FormatError("no characters", last, 1, source)
    return SpaceOfOrderings.canonical(dim, chars, name)


def char_string(s: int, dim: int) -> str:
    return "".join("-" if (s >> (dim - 1 - i)) & 1 else "+" for i in range(dim))


def serialize_sos(space: SpaceOfOrderings) -> str:
    """Canonical text; non-canonical inputs are re-based first."""
    space = normalize(space)
    if any(not (s >> (space.dim - 1)) & 1 for s in space.chars):
        raise SpaceError("cannot serialize: some character is not -1 at -1")
    out = ["sos 1", f"dim {space.dim}"]
    if space.name:
        out.append(f"name {space.name}")
    out += [f"char {char_string(s, space.dim)}" for s in sorted(space.chars, reverse=True)]
    return "\n".join(out) + "\n"


def read_sos(path: str | Path) -> SpaceOfOrderings:
    path = Path(path)
    return parse_sos(path.read_text(encoding="utf-8"), str(path))


# -- .cgp ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Presentation:
    """Generators s1..sn and relator words, as written."""

    gens: int
    relators: tuple[Word, ...]


_TOKEN = re.compile(r"\[\s*s(\d+)\s*,\s*s(\d+)\s*\]|s(\d+)(?:\^(\d+))?|\S+")


def parse_word(text: str, gens: int, line: int = 1, col: int = 1, source: str | None = None) -> Word:
    word: list[tuple[int, int]] = []

    def gen(index: str, at: int) -> int:
        k = int(index)
        if not 1 <= k <= gens:
            raise FormatError(f"generator s{k} out of range 1..{gens}", line, at, source)
        return k - 1

    for m in _TOKEN.finditer(text):
        at = col + m.start()
        if m.group(1) is not None:
            i, j = gen(m.group(1), at), gen(m.group(2), at)
            word += [(i, 3), (j, 3), (i, 1), (j, 1)]
        elif m.group(3) is not None:
            e = 1 if m.group(4) is None else int(m.group(4))
            if e not in (1, 2, 3):
                raise FormatError(f"exponent must be 1, 2 or 3, got {e}", line, at, source)
            word.append((gen(m.group(3), at), e))
        else:
            raise FormatError(f"invalid token {m.group(0)!r}", line, at, source)
    if not word:
        raise FormatError("empty relator", line, col, source)
    return tuple(word)


def parse_cgp(text: str, source: str | None = None) -> Presentation:
    lines = _lines(text)
    gens = _header(lines, "cgp", "gens", GENS_LIMIT, source)
    rels = []
    for no, col, line in lines:
        key, _, rest = line.partition(" ")
        if key != "rel":
            raise FormatError(f"unexpected keyword {key!r}", no, col, source)
        rels.append(parse_word(rest, gens, no, col + 4, source))
    return Presentation(gens, tuple(rels))


def word_string(word: Word) -> str:
    return " ".join(f"s{i + 1}" if e == 1 else f"s{i + 1}^{e}" for i, e in word)


def serialize_cgp(p: Presentation) -> str:
    out = ["cgp 1", f"gens {p.gens}"] + [f"rel {word_string(w)}" for w in p.relators]
    return "\n".join(out) + "\n"


def read_cgp(path: str | Path) -> Presentation:
    path = Path(path)
    return parse_cgp(path.read_text(encoding="utf-8"), str(path))


FIXTURES = Path(__file__).parent / "fixtures"


def fixture(name: str) -> Path:
    return FIXTURES / name


__all__ = [
    "FormatError", "Presentation", "Word", "parse_sos", "serialize_sos", "read_sos", "char_string",
    "parse_word", "parse_cgp", "serialize_cgp", "read_cgp", "word_string", "fixture", "FIXTURES",
]
