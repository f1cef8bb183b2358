from pathlib import Path

import numpy as np
import pytest

from weierkern.curve import SpaceCurve, adopt_fixture, primary_fixture
from weierkern.curvefile import LoadedCurve, load_curve

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


@pytest.fixture(scope="session")
def fixture_curve() -> SpaceCurve:
    return load_curve(fixture_path("fixture.json")).curve


@pytest.fixture(scope="session")
def smooth_curve() -> SpaceCurve:
    # the primary curve is reducible; checks that need smoothness run on the seeded fallback
    return adopt_fixture(primary_fixture(), 0).curve


@pytest.fixture(scope="session")
def parabola() -> LoadedCurve:
    return load_curve(fixture_path("parabola.json"))


@pytest.fixture(scope="session")
def hyperelliptic() -> LoadedCurve:
    return load_curve(fixture_path("hyperelliptic_quartic.json"))


@pytest.fixture(scope="session")
def tower() -> SpaceCurve:
    return load_curve(fixture_path("tower.json")).curve


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)
