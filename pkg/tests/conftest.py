from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

# every property suite runs at least 200 cases; derandomized so reruns are identical
settings.register_profile("hsalg", max_examples=200, deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("hsalg")


def rationals(bound=5, denom=4):
    return st.builds(Fraction, st.integers(-bound, bound), st.integers(1, denom))


def nonzero_rationals(bound=5, denom=4):
    return rationals(bound, denom).filter(bool)


# PASS/FAIL lines recorded by test_acceptance.py, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
