import itertools
import os

from hypothesis import HealthCheck, settings

from semvia.model import ChannelParams, SourceParams
from semvia.policies import MRS, RS, ChangeAware, SemanticsAware

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

GRID_PQ = (0.1, 0.3, 0.5, 0.7, 0.9)
GRID_PS = (0.1, 0.5, 0.9)
GRID_PA = (0.3, 0.7, 1.0)
GRID_Q12 = (0.2, 0.6, 1.0)


def grid_policies():
    pols = [RS(a) for a in GRID_PA]
    pols += [MRS(a, b) for a, b in itertools.product(GRID_Q12, repeat=2)]
    return pols + [ChangeAware(), SemanticsAware()]


def grid_points():
    """(source, channel, policy) over the full validation grid."""
    for p, q, ps in itertools.product(GRID_PQ, GRID_PQ, GRID_PS):
        for pol in grid_policies():
            yield SourceParams(p, q), ChannelParams(ps), pol


# Optimal (q1, q2) under eta = 0.5 for p = 0.1, 0.3, 0.5, 0.7, 0.9, keyed by (p_s, q).
# The same pairs minimise both AoIV and AoII.
TABLE_P = (0.1, 0.3, 0.5, 0.7, 0.9)
MRSC_TABLE = {
    (0.1, 0.2): [(1, 1), (1, 1), (0, 1), (0, 1), (0, 1)],
    (0.1, 0.8): [(0, 1), (0, 1), (0, 1), (0.963, 1), (0.958, 1)],
    (0.9, 0.2): [(1, 1), (1, 1), (1, 1), (1, 1), (1, 1)],
    (0.9, 0.8): [(1, 1), (1, 1), (0.856, 1), (0.753, 1), (0.717, 1)],
}
EQUAL_TABLE = {
    (0.1, 0.2): [1, 1, 1, 1, 1],
    (0.1, 0.8): [1, 1, 1, 0.972, 0.963],
    (0.9, 0.2): [1, 1, 1, 1, 1],
    (0.9, 0.8): [1, 1, 0.866, 0.772, 0.731],
}


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
