"""Shared helpers for the test suite."""

import lgfronts as lg


def make_model(**kw):
    base = dict(a=1.0, b=0.5, d=1.0, mu=1.0, beta=1.0, h0=1.0)
    u0 = kw.pop("u0", None)
    v0 = kw.pop("v0", None)
    base.update(kw)
    return lg.validate_params(lg.ModelParams(**base), u0, v0)


def report(num: int, ok: bool, what: str, details: str) -> None:
    """One uniform line per acceptance criterion (visible with -s;
    the per-test PASSED/FAILED line carries the same verdict)."""
    status = "PASS" if ok else "FAIL"
    print(f"criterion {num:02d} {status}: {what} ({details})")
