"""Trace records and the text trace format.

One record per line::

    <cycle-decimal> <ip-hex> <addr-hex> <R|W>

e.g. ``1042 0x400f3a 0x7fe4c0 W``. Blank lines and lines starting with ``#``
are ignored.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, TextIO, Union


class TraceFormatError(ValueError):
    def __init__(self, message: str, index: int):
        super().__init__(f"record {index}: {message}")
        self.index = index


class AccessRecord(NamedTuple):
    cycle: int
    ip: int
    addr: int
    kind: str  # "R" or "W"

    @property
    def is_write(self) -> bool:
        return self.kind == "W"

    def format(self) -> str:
        return f"{self.cycle} {self.ip:#x} {self.addr:#x} {self.kind}"


def parse_line(line: str, lineno: int) -> AccessRecord:
    parts = line.split()
    if len(parts) != 4:
        raise TraceFormatError(f"expected 4 fields, got {len(parts)}: {line.strip()!r}", lineno)
    cyc, ip, addr, kind = parts
    try:
        rec = AccessRecord(int(cyc, 10), int(ip, 16), int(addr, 16), kind.upper())
    except ValueError as exc:
        raise TraceFormatError(str(exc), lineno) from None
    if rec.kind not in ("R", "W"):
        raise TraceFormatError(f"kind must be R or W, got {kind!r}", lineno)
    if rec.cycle < 0 or rec.ip < 0 or rec.addr < 0:
        raise TraceFormatError("negative field", lineno)
    return rec


def iter_trace(fh: TextIO) -> Iterator[AccessRecord]:
    """Parse records from an open text stream; errors carry the 1-based line number."""
    for lineno, line in enumerate(fh, start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        yield parse_line(s, lineno)


def read_trace(path: Union[str, Path]) -> list[AccessRecord]:
    with open(path, "r", encoding="ascii") as fh:
        return list(iter_trace(fh))


def write_trace(records: Iterable[AccessRecord], out: Union[str, Path, TextIO]) -> int:
    """Write records in the text format; returns the record count."""
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="ascii", newline="\n") as fh:
            return write_trace(records, fh)
    n = 0
    buf = []
    for rec in records:
        buf.append(f"{rec[0]} {rec[1]:#x} {rec[2]:#x} {rec[3]}\n")
        n += 1
        if len(buf) >= 65536:
            out.write("".join(buf))
            buf.clear()
    out.write("".join(buf))
    return n


def format_trace(records: Iterable[AccessRecord]) -> str:
    buf = io.StringIO()
    write_trace(records, buf)
    return buf.getvalue()
