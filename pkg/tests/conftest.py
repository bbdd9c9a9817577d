import pytest

from plswe.instance import PLSInstance, generate_instance, reference_solve


@pytest.fixture
def tiny():
    """y = 1/x over F_7."""
    return PLSInstance.from_lists(7, [[[0, 1]]], [[1]])


@pytest.fixture(scope="session")
def medium():
    inst = generate_instance(10007, 2, 2, 1, 1)
    return inst, reference_solve(inst)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
