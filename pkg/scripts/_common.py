"""Helpers shared by the experiment scripts."""
from pathlib import Path

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def config(name: str) -> Path:
    return CONFIGS / f"{name}.cfg"
