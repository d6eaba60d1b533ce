"""Flat ``key = value`` run configuration with CLI-flag overrides.

One schema per subcommand lists the known keys, their parsers and
defaults.  Unknown keys are rejected; a missing required key is a
configuration error naming the key.  Values given on the command line
override values from the config file.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable


class ConfigError(Exception):
    """Invalid or incomplete run configuration (CLI exit code 2)."""


REQUIRED = object()


def parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError as e:
        raise ConfigError(f"not a number: {text!r}") from e


def parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError as e:
        raise ConfigError(f"not an integer: {text!r}") from e


def parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "1", "yes"):
        return True
    if t in ("false", "0", "no"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def parse_int_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"expected two comma-separated integers: {text!r}")
    return parse_int(parts[0]), parse_int(parts[1])


def parse_float_pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"expected two comma-separated numbers: {text!r}")
    return parse_float(parts[0]), parse_float(parts[1])


def parse_float_triple(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(f"expected three comma-separated numbers: {text!r}")
    return tuple(parse_float(p) for p in parts)  # type: ignore[return-value]


def parse_axis(text: str) -> tuple[float, float, float]:
    """``start:step:stop`` for one angular axis."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"expected start:step:stop: {text!r}")
    start, step, stop = (parse_float(p) for p in parts)
    if step <= 0:
        raise ConfigError(f"step must be positive in {text!r}")
    return start, step, stop


def parse_grid(text: str) -> tuple[float, float, float, float, float, float]:
    """Azimuth and elevation axes: ``az0:azstep:az1,el0:elstep:el1``.

    Returned in (az_start, az_stop, az_step, el_start, el_stop, el_step)
    order, matching the coverage-grid constructor.
    """
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"expected az and el axes separated by a comma: {text!r}")
    a0, astep, a1 = parse_axis(parts[0])
    e0, estep, e1 = parse_axis(parts[1])
    return (a0, a1, astep, e0, e1, estep)


def parse_scalar_or_range(text: str) -> list[float]:
    """A single number, or ``start:step:stop`` expanded inclusively."""
    if ":" not in text:
        return [parse_float(text)]
    start, step, stop = parse_axis(text)
    if start > stop:
        raise ConfigError(f"empty range: {text!r}")
    out = []
    v = start
    k = 0
    while v <= stop + 1e-9:
        out.append(start + k * step)
        k += 1
        v = start + k * step
    return out


def parse_str(text: str) -> str:
    return text


@dataclass(frozen=True)
class Key:
    parser: Callable[[str], Any]
    default: Any = REQUIRED
    help: str = ""


def read_config_file(path: str) -> dict[str, str]:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    values: dict[str, str] = {}
    try:
        with open(path) as f:
            for lineno, raw in enumerate(f, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
                key, _, value = line.partition("=")
                values[key.strip()] = value.strip()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    return values


def resolve(
    schema: dict[str, Key],
    config_values: dict[str, str],
    cli_values: dict[str, str],
) -> dict[str, Any]:
    """Merge config-file and CLI values against a schema.

    CLI values win; unknown keys are rejected; required keys must be
    present after the merge.
    """
    unknown = set(config_values) - set(schema)
    if unknown:
        raise ConfigError(f"unknown config key: {sorted(unknown)[0]}")
    unknown = set(cli_values) - set(schema)
    if unknown:
        raise ConfigError(f"unknown option key: {sorted(unknown)[0]}")

    out: dict[str, Any] = {}
    for name, key in schema.items():
        if name in cli_values and cli_values[name] is not None:
            out[name] = key.parser(cli_values[name])
        elif name in config_values:
            out[name] = key.parser(config_values[name])
        elif key.default is REQUIRED:
            raise ConfigError(f"missing required key: {name}")
        else:
            out[name] = key.default
    return out
