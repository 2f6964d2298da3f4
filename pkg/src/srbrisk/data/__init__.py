"""Bundled PSPLib-style fixtures."""
from importlib import resources


def fixture_path(name: str) -> str:
    """Filesystem path of a bundled fixture such as ``"j30_01.sm"``."""
    return str(resources.files(__name__).joinpath(name))


def fixture_names(suffix: str = "") -> list[str]:
    return sorted(p.name for p in resources.files(__name__).iterdir() if p.name.endswith(suffix) and not p.name.startswith("_"))
