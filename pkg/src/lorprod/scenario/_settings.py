import dataclasses
import os
import pathlib

OUT_ENV_VAR = "LORPROD_OUT"
DEFAULT_OUT = "lorprod_out"


@dataclasses.dataclass(slots=True, frozen=True)
class Settings:
    """Defaults for a scenario run, overridden by scenario fields and CLI flags."""

    tolerance: float = 1e-9
    seed: int = 0
    hop_radius: int = 1
    max_steps: int = 50_000_000
    max_wide_steps: int = 1_000_000
    bisection_tolerance: float = 1e-8

    def replace(self, **changes: object) -> "Settings":
        """A copy with the non-None changes applied."""
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})  # type: ignore[arg-type]


def resolve_out_dir(flag: str | os.PathLike | None, scenario_out: str | None) -> pathlib.Path:
    """The output directory: CLI flag, then scenario field, then $LORPROD_OUT."""
    for candidate in (flag, scenario_out, os.environ.get(OUT_ENV_VAR)):
        if candidate:
            return pathlib.Path(candidate)
    return pathlib.Path(DEFAULT_OUT)
