import json

import pytest

from hotspot.models.domain_models import CurveSpec, DomainKind, DomainSpec, ProfileSpec

# Coarse grid used by the fast tests
COARSE_H = 1.0 / 32.0


@pytest.fixture(autouse=True)
def setup_test_env(monkeypatch):
    """Run every test under the testing configuration."""
    monkeypatch.setenv("HOTSPOT_ENV", "testing")
    monkeypatch.setenv("HOTSPOT_THREADS", "1")
    yield


@pytest.fixture
def coarse_h():
    return COARSE_H


@pytest.fixture
def unit_disk():
    return DomainSpec(id="disk", kind=DomainKind.BALL, center=[0.0, 0.0], radius=1.0)


@pytest.fixture
def ellipse():
    return DomainSpec(id="ellipse", kind=DomainKind.ELLIPSE, center=[0.0, 0.0], semi_axes=[2.0, 1.0])


@pytest.fixture
def rectangle():
    return DomainSpec(id="rectangle", kind=DomainKind.RECTANGLE, lower=[0.0, 0.0], upper=[4.0, 2.0])


@pytest.fixture
def kite():
    return DomainSpec(id="kite", kind=DomainKind.SMOOTH_CURVE, center=[0.0, 0.0],
                      curve=CurveSpec(name="kite", params={"k": 0.65, "s": 1.5}))


@pytest.fixture
def sphere():
    return DomainSpec(id="sphere", kind=DomainKind.REVOLUTION, center=[0.0, 0.0, 0.0],
                      profile=ProfileSpec(name="sphere", params={"radius": 1.0}))


@pytest.fixture
def dumbbell():
    return DomainSpec(id="dumbbell", kind=DomainKind.REVOLUTION, center=[0.0, 0.0, 0.0],
                      profile=ProfileSpec(name="dumbbell", params={"R": 1.0, "r": 0.55}))


@pytest.fixture
def config_dir():
    from hotspot.config import Config
    return Config.CONFIG_DIR


@pytest.fixture
def config_file(tmp_path):
    """Writer dumping a config document to a temporary JSON file."""
    def write(document, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document))
        return path
    return write


@pytest.fixture
def disk_torsion_config():
    return {
        "name": "disk-torsion",
        "h": COARSE_H,
        "tolerance": 0.05,
        "experiments": [
            {"domain": {"id": "disk", "kind": "ball", "center": [0.0, 0.0], "radius": 1.0},
             "problems": [{"kind": "torsion", "bounds": ["torsion_meanconvex", "torsion_max_upper"]}]}
        ],
    }
