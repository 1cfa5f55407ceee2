"""Regenerate the golden CLI outputs under tests/golden/.

Runs the scripted cycle against a throwaway store with the same pinned
clock the tests use. Run this after any intentional behavior change, then
review the diff like any other code change.
"""

from __future__ import annotations

import os
import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
GOLDEN_DIR = REPO / "tests" / "golden"
SAMPLE = REPO / "src" / "convomap" / "data" / "sample_export.json"
FIXED_TIME = "2024-01-01T00:00:00Z"

STEPS = [
    ("01_ingest.json", ["ingest", str(SAMPLE)]),
    ("02_analyze.json", ["analyze", "c0001"]),
    ("03_layout_global.json", ["layout", "c0001", "global"]),
    ("04_layout_topic_grid.json", ["layout", "c0001", "topic", "t0", "--mode", "grid", "--key", "degree"]),
    ("05_search.json", ["search", "c0001", "tokenizer vocabulary corpus"]),
    ("06_ask.json", ["ask", "c0001", "How should the benchmark treat the new baseline?", "--context", "n12,n14"]),
    ("07_layout_topic_force.json", ["layout", "c0001", "topic", "t2", "--mode", "force", "--layout-seed", "7"]),
]


def main() -> None:
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        env = {k: v for k, v in os.environ.items() if not k.startswith("CONVOMAP_")}
        env["CONVOMAP_FIXED_TIME"] = FIXED_TIME
        for filename, args in STEPS:
            result = subprocess.run(
                [sys.executable, "-m", "convomap.cli", "--store", f"{tmp}/store", "--format", "json", *args],
                capture_output=True,
                env=env,
                check=True,
            )
            (GOLDEN_DIR / filename).write_bytes(result.stdout)
            print(f"wrote {filename} ({len(result.stdout)} bytes)")


if __name__ == "__main__":
    main()
