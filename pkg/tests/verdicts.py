"""Collects one verdict line per acceptance criterion for the terminal summary."""

from __future__ import annotations

#: lines in the order the criteria ran
LINES: list[str] = []


def record(number: int, title: str, ok: bool, detail: str) -> bool:
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    LINES.append(line)
    print(line, flush=True)
    return ok
