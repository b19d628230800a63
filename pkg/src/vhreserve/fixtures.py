"""Instances from the literature, bundled as applicant/quota file pairs."""

from __future__ import annotations

from importlib import resources

from .core import Instance, load_instance

FIXTURES = {
    "example1": "five applicants, one SC seat, one open seat protected for women",
    "ex1": "one category, two seats, i1 holds both traits",
    "ex2": "one category, three seats, i1 holds both traits",
    "gujarat": "100 seats over OC/SC/ST/SEBC with one-third protected for women",
}


def fixture_texts(name: str) -> tuple[str, str]:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
    data = resources.files(__package__) / "data"
    return (data / f"{name}.csv").read_text(encoding="utf-8"), (data / f"{name}.json").read_text(encoding="utf-8")


def load_fixture(name: str) -> Instance:
    return load_instance(*fixture_texts(name))
