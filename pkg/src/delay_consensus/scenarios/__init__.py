"""Shipped scenario configurations."""
from importlib import resources
from pathlib import Path


def names() -> list[str]:
    return sorted(
        entry.name[: -len(".json")]
        for entry in resources.files(__package__).iterdir()
        if entry.name.endswith(".json")
    )


def path(name: str) -> Path:
    """Filesystem path of a shipped scenario, e.g. path('leaderless6')."""
    target = resources.files(__package__) / f"{name}.json"
    if not target.is_file():
        raise FileNotFoundError(f"no shipped scenario {name!r}; available: {names()}")
    return Path(str(target))
