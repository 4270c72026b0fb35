import numpy as np
import pytest

from moutardnet.laguerre import generate_L_isothermic
from moutardnet.moebius import generate_isothermic_with_metric
from moutardnet.samples import isothermic_sample, lisothermic_sample


@pytest.fixture(scope="session")
def iso15():
    """Generic isothermic net on a 15x15 box with its metric, labels and axes."""
    axes, labels = isothermic_sample(15, 15, seed=7)
    f, s, coeffs = generate_isothermic_with_metric(axes, labels)
    return {"f": f, "s": s, "coeffs": coeffs, "axes": axes, "labels": labels}


@pytest.fixture(scope="session")
def iso8():
    axes, labels = isothermic_sample(8, 9, seed=11)
    f, s, coeffs = generate_isothermic_with_metric(axes, labels)
    return {"f": f, "s": s, "coeffs": coeffs, "axes": axes, "labels": labels}


@pytest.fixture(scope="session")
def lnet():
    gauss, labels, offsets = lisothermic_sample(9, 10, seed=3)
    return generate_L_isothermic(gauss, labels, offsets)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = []


@pytest.fixture
def record():
    """Log one PASS/FAIL line per acceptance criterion (also shown in the terminal summary)."""

    def _record(number, title, ok, detail=""):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}  {detail}".rstrip()
        _ACCEPTANCE.append((number, line))
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
