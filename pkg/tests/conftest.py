import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from keysched.ingest import Frame, FrameSequence, write_pgm

_ACCEPTANCE_RESULTS = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _ACCEPTANCE_RESULTS.append((report.nodeid.split("::")[-1], report.passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed in _ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}")


def moving_square_frames(count=16, height=32, width=48):
    """Deterministic synthetic clip: a bright square sliding right."""
    frames = []
    for t in range(count):
        img = np.full((height, width), 0.2)
        x0 = 4 + 2 * t
        img[10:20, x0:x0 + 8] = 0.9
        frames.append(Frame(height=height, width=width, pixels=img))
    return FrameSequence(frames=frames, fps=24.0)


@pytest.fixture
def synthetic_clip():
    return moving_square_frames()


@pytest.fixture
def pgm_dir(tmp_path):
    """Write the synthetic clip out as numbered PGM files."""
    d = tmp_path / "frames"
    d.mkdir()
    seq = moving_square_frames()
    for i, frame in enumerate(seq.frames):
        write_pgm(frame, d / f"frame_{i:04d}.pgm")
    return d
