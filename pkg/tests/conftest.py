import numpy as np
import pytest

from inertia_forecast import FeatureSpec, to_hour
from inertia_forecast.synthetic import default_coefficients, generate_synthetic

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    status = _criteria.get(number, (title, "PASS", ""))[1]
    if rep.skipped:
        reason = rep.longrepr[2] if isinstance(rep.longrepr, tuple) else ""
        _criteria[number] = (title, "SKIP" if status != "FAIL" else status, reason)
    elif rep.failed:
        _criteria[number] = (title, "FAIL", "")
    elif rep.when == "call" and number not in _criteria:
        _criteria[number] = (title, "PASS", "")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, status, note = _criteria[number]
        line = f"criterion {number:2d} [{status}] {title}"
        if note:
            line += f"  ({note})"
        terminalreporter.write_line(line)


YEAR_2019 = (to_hour("2019-01-01"), to_hour("2020-01-01"))


@pytest.fixture(scope="session")
def base_spec():
    return FeatureSpec()


@pytest.fixture(scope="session")
def synthetic_year(base_spec):
    """Noise-free one-year synthetic dataset and its generating coefficients."""
    coefs = default_coefficients(base_spec)
    ds = generate_synthetic(base_spec, coefs, 0.0, YEAR_2019, seed=11)
    return ds, coefs


@pytest.fixture(scope="session")
def noisy_dataset():
    """Two-and-a-half years with noise and forecast error; trend window = 2019."""
    spec = FeatureSpec(hydro_lag=True)
    return generate_synthetic(spec, default_coefficients(spec), 3000.0,
                              (to_hour("2018-01-01"), to_hour("2020-07-01")),
                              seed=5, forecast_error=0.05)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
