import pytest

from spannerlab import defaults


@pytest.fixture(autouse=True)
def quiet_progress():
    verbose = defaults['report_progress']
    defaults['report_progress'] = False
    yield
    defaults['report_progress'] = verbose
