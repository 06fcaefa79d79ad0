import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from checksynth import composer, sheets  # noqa: E402
from checksynth.synthetic import make_collection  # noqa: E402


@pytest.fixture(scope="session")
def collection_dir(tmp_path_factory):
    """Two persons, full protocol: 16 genuine + 8 forged each."""
    out = tmp_path_factory.mktemp("sheets")
    make_collection(out, persons=2, seed=3)
    return out


@pytest.fixture(scope="session")
def samples_dir(collection_dir, tmp_path_factory):
    from checksynth.cli import cmd_extract

    out = tmp_path_factory.mktemp("samples")
    cmd_extract(collection_dir / "manifest.csv", collection_dir, out)
    return out


@pytest.fixture(scope="session")
def samples(samples_dir):
    return sheets.load_samples(samples_dir)


@pytest.fixture(scope="session")
def template():
    return composer.synthetic_template("t00", 11)


def scribble(w=60, h=24, seed=0):
    """Small random signature sample with ink touching all four edges."""
    rng = np.random.default_rng(seed)
    mask = (rng.random((h, w)) < 0.3).astype(np.uint8)
    mask[0, :] = mask[-1, :] = 1
    mask[:, 0] = mask[:, -1] = 1
    crop = np.where(mask == 1, 40, 240).astype(np.uint8)
    return sheets.SignatureSample("P01", False, "ballpoint", crop, mask)


# acceptance results, printed once at the end of the session
ACCEPTANCE: list[tuple[str, str, str]] = []


def record(criterion, ok, detail):
    ACCEPTANCE.append((str(criterion), "PASS" if ok is True else ("FAIL" if ok is False else ok), detail))
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit, status, detail in sorted(ACCEPTANCE, key=lambda r: int(r[0])):
        terminalreporter.write_line(f"criterion {crit}: {status}  {detail}")
