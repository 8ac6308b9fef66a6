from __future__ import annotations

import csv
import sys
from pathlib import Path


def emit(header, rows, out: str | None = None) -> None:
    """Write rows as CSV to ``out`` (created if needed) or stdout."""
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        fh = open(out, "w", newline="")
    else:
        fh = sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if out:
        fh.close()
        print(f"wrote {len(rows)} rows to {out}", file=sys.stderr)
