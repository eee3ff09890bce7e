"""Run every config in ``configs/`` through the CLI into ``results/<name>/``."""
import sys
from pathlib import Path

import yaml

from prony_lab.cli import main

ROOT = Path(__file__).resolve().parents[1]

if __name__ == "__main__":
    status = 0
    for path in sorted((ROOT / "configs").glob("*.yaml")):
        task = yaml.safe_load(path.read_text())["task"]
        out = ROOT / "results" / path.stem
        code = main([task, "--config", str(path), "--out", str(out)] + sys.argv[1:])
        print(f"{path.name:28s} {task:16s} exit {code} -> {out.relative_to(ROOT)}")
        status = max(status, code)
    sys.exit(status)
