import pytest

from hcnsleep import interference_factor, load_config


@pytest.fixture(scope="session")
def defaults():
    return load_config()


@pytest.fixture(scope="session")
def cfg(defaults):
    return defaults[0]


@pytest.fixture(scope="session")
def qos(defaults):
    return defaults[1]


@pytest.fixture(scope="session")
def I(cfg):
    return interference_factor(cfg)


ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def report(request):
    """Record one acceptance verdict; the list is printed after the run."""
    def record(criterion: str, ok: bool, detail: str):
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
        request.config.stash[ACCEPTANCE].append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
