"""Solved sphere families shared by the test modules.

Solving is the expensive part of the suite, so every family is computed
once per session: continuation on level 3 from H = 20 down to 0, landing
on the test values of H, then Newton refinement to finer levels on demand.
"""
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cmclab.frame_integrator import reconstruct  # noqa: E402
from cmclab.metric_lie_group import derive_constants  # noqa: E402
from cmclab.sphere_solver import continue_family, refine  # noqa: E402
from cmclab.symmetry_geometry import center_of_symmetry, refined_center  # noqa: E402

TEST_GROUPS = {
    "round": (2.0, 2.0, 2.0),
    "berger": (2.0, 2.0, 1.0),
    "generic": (3.0, 2.0, 1.0),
    "berger441": (4.0, 4.0, 1.0),
}
H_VALUES = (20.0, 2.0, 1.0, 0.5, 0.0)
COARSE = 3


def start_value(c):
    # the large-H initializer needs H_start >= 10 max(1, |c_i|)
    return max(20.0, 10.0 * max(1.0, *map(abs, c)))


class FamilyCache:
    def __init__(self):
        self._family = {}
        self._fields = {}
        self._immersions = {}
        self._centers = {}
        self.timings = {}

    @staticmethod
    def group(name):
        return derive_constants({"c": list(TEST_GROUPS[name])})

    def family(self, name):
        """All accepted continuation steps ``(H, field, immersion)`` on the coarse level."""
        if name not in self._family:
            t0 = time.perf_counter()
            fam = continue_family(self.group(name), start_value(TEST_GROUPS[name]), 0.0, level=COARSE, stops=H_VALUES)
            self.timings[(name, "continuation")] = time.perf_counter() - t0
            self._family[name] = fam
        return self._family[name]

    def field(self, name, H, level=4):
        key = (name, float(H), level)
        if key not in self._fields:
            if level == COARSE:
                matches = [f for h, f, _ in self.family(name) if h == H]
                if not matches:
                    raise KeyError(f"H={H} is not a continuation stop")
                self._fields[key] = matches[-1]
            else:
                coarse = self.field(name, H, level - 1)
                t0 = time.perf_counter()
                self._fields[key] = refine(self.group(name), coarse, 1)
                self.timings[key] = time.perf_counter() - t0
        return self._fields[key]

    def immersion(self, name, H, level=4):
        key = (name, float(H), level)
        if key not in self._immersions:
            self._immersions[key] = reconstruct(self.group(name), self.field(name, H, level))
        return self._immersions[key]

    def center(self, name, H, level=4):
        key = (name, float(H), level)
        if key not in self._centers:
            group = self.group(name)
            _, t = center_of_symmetry(group, self.family(name), H)
            self._centers[key] = refined_center(group, self.immersion(name, H, level), t)[0]
        return self._centers[key]

    def solve_time(self, name, H, level):
        """Continuation plus the refinements leading to ``level``."""
        self.field(name, H, level)
        total = self.timings[(name, "continuation")]
        for lv in range(COARSE + 1, level + 1):
            total += self.timings.get((name, float(H), lv), 0.0)
        return total


@pytest.fixture(scope="session")
def families():
    return FamilyCache()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
