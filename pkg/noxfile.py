import os
import tempfile
from pathlib import Path

import nox

_py_versions = range(12, 15)
_python_sessions = [f"3.{v}" for v in _py_versions]

_SCENARIOS = Path("tests/data")


@nox.session(python=_python_sessions)
def test(session: nox.Session) -> None:
    posargs = list(session.posargs)
    env = os.environ.copy()

    session.install("-e.[test]")
    session.run("pytest", "--cov=lorprod", "--cov-report=term-missing", *posargs, env=env)


@nox.session(python=_python_sessions)
def scenarios(session: nox.Session) -> None:
    """Run the shipped scenarios through the command line twice and compare the reports."""
    env = os.environ.copy()
    session.install(".")

    for path in sorted(_SCENARIOS.glob("*.yaml")):
        with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
            for out in (first, second):
                session.run("lorprod", "run", str(path), "--out", out, "--seed", "1", env=env)
            reports = [(Path(out) / "report.json").read_text() for out in (first, second)]
            if reports[0] != reports[1]:
                session.error(f"{path.name}: reports differ between runs")


@nox.session(python=_python_sessions)
def type_check(session: nox.Session) -> None:
    posargs = list(session.posargs)
    env = os.environ.copy()

    session.install(".[typing]")
    session.run("mypy", "src", "tests", *posargs, env=env)


@nox.session(python=_python_sessions)
def ruff(session: nox.Session) -> None:
    posargs = list(session.posargs)
    env = os.environ.copy()

    session.install(".[lint]")
    session.run("ruff", "check", *posargs, env=env)
