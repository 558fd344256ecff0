"""Small input/output helpers shared across the file-format modules."""

from __future__ import annotations

from pathlib import Path


class open_lines:
    """Context manager yielding lines from a path or from an open stream."""

    def __init__(self, source):
        self.source = source
        self._fh = None

    def __enter__(self):
        if isinstance(self.source, (str, Path)):
            self._fh = open(self.source, encoding="utf-8")
            return self._fh
        return self.source

    def __exit__(self, *exc):
        if self._fh is not None:
            self._fh.close()
        return False


def write_text(destination, text: str) -> None:
    """Write text to a path or an already-open stream."""
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        destination.write(text)
