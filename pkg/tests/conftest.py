import re

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("kdq", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("kdq")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    # one line per acceptance criterion, folding parametrized cases and parts
    results = {}
    for outcome in ("passed", "failed", "xfailed", "xpassed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" not in rep.nodeid or rep.when != "call":
                continue
            m = re.search(r"test_criterion_(\d+)([a-z]?)_(\w+?)(?:\[|$)", rep.nodeid)
            if not m:
                continue
            ok = outcome in ("passed", "xpassed")
            entry = results.setdefault(int(m.group(1)), {"ok": True, "parts": []})
            entry["ok"] &= ok
            part = m.group(3) if not m.group(2) else f"{m.group(2)}:{m.group(3)}"
            if part not in [p for p, _ in entry["parts"]] or not ok:
                entry["parts"].append((part, ok))
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        entry = results[num]
        failed = sorted({p for p, ok in entry["parts"] if not ok})
        names = sorted({p for p, _ in entry["parts"]})
        detail = ", ".join(names) if not failed else "failed: " + ", ".join(failed)
        terminalreporter.write_line(f"criterion {num:2d}  {'PASS' if entry['ok'] else 'FAIL'}  {detail}")
