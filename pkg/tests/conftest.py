from __future__ import annotations

from importlib import resources

import pytest
from hypothesis import settings

from tmfmi import ahss, modules, verifier

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")


def fixture_paths():
    d = resources.files("tmfmi").joinpath("data", "modules")
    return sorted((p for p in d.iterdir() if p.name.endswith(".txt")), key=lambda p: p.name)


@pytest.fixture(scope="session")
def fixtures() -> dict[str, modules.ModulePresentation]:
    return {p.name[:-4]: modules.loads(p.read_text()) for p in fixture_paths()}


@pytest.fixture(scope="session")
def ahss_run() -> ahss.AHSSRun:
    return ahss.run_ahss()


@pytest.fixture(scope="session")
def ctx() -> verifier.Context:
    return verifier.load_context()
