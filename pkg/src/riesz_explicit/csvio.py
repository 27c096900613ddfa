"""CSV conventions shared by all writers: '.' decimals, LF endings, 17 digits."""

from __future__ import annotations

import contextlib
import csv


@contextlib.contextmanager
def open_target(target):
    """Yield a text stream for a path or pass an open stream through."""
    if hasattr(target, "write"):
        yield target
    else:
        with open(target, "w", newline="", encoding="utf-8") as fh:
            yield fh


def write_csv(target, header, rows) -> None:
    with open_target(target) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def g17(v: float) -> str:
    return f"{v:.17g}"
