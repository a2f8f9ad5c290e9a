from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stereorig.registry import lookup, parse_device_specs


@pytest.fixture(scope="session")
def registry():
    text = (
        resources.files("stereorig.data").joinpath("devices.json").read_text("utf-8")
    )
    return parse_device_specs(text)


@pytest.fixture(scope="session")
def j7(registry):
    return lookup(registry, "J7-fixture")


@pytest.fixture(scope="session")
def a5(registry):
    return lookup(registry, "A5-fixture")


@pytest.fixture(scope="session")
def compact(registry):
    return lookup(registry, "compact-fixture")


@pytest.fixture(scope="session")
def golden_path():
    return Path(__file__).parent / "golden" / "j7_two_phone.svg"
