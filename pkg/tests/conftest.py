from __future__ import annotations

from typing import Dict, List, Tuple

# criterion number -> [(passed, detail), ...], filled by test_acceptance
ACCEPTANCE: Dict[int, List[Tuple[bool, str]]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE.setdefault(criterion, []).append((ok, detail))
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")


def acceptance_lines() -> List[str]:
    lines = []
    for k in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[k]
        ok = all(p for p, _ in parts)
        lines.append(f"criterion {k}: {'PASS' if ok else 'FAIL'}  " + "; ".join(d for _, d in parts))
    return lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = acceptance_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
