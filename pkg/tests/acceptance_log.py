"""Collects one PASS/FAIL line per acceptance criterion for the summary."""
LINES = []


def report(label, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {label}: {detail}"
    LINES.append(line)
    print(line)
    return ok
