import os
from typing import Any, Dict, Optional

from dotenv import dotenv_values

from core.errors import ConfigError


class ParseError(ConfigError):
    pass


def parse_config_file(path: str) -> Dict[str, str]:
    """
    Read a plain key=value config file.

    Keys are normalized to the CLI's dest names: lower case, dashes become
    underscores. Comments and blank lines follow dotenv rules.

    Raises:
        ParseError: The file is missing or a key has no value
    """
    if not os.path.isfile(path):
        raise ParseError(f"Config file not found: {path}")

    raw = dotenv_values(path)

    data = {}
    for key, value in raw.items():
        if value is None:
            raise ParseError(f"Missing value for key: {key}")
        data[key.strip().lower().replace("-", "_")] = value.strip()
    return data


def parse_float(data: Dict[str, Any], key: str, default: Optional[float] = None) -> Optional[float]:
    """Float value of key, or default when the key is absent."""
    if key not in data or data[key] is None:
        return default
    value = data[key]
    if isinstance(value, (int, float)):
        return float(value)
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ParseError(f"{key} must be a number, got {value!r}")


def parse_choice(data: Dict[str, Any], key: str, choices: list[str], default: Optional[str] = None) -> Optional[str]:
    if key not in data or data[key] is None:
        return default
    value = str(data[key]).strip().lower()
    if value not in choices:
        raise ParseError(f"Invalid {key}: {value}. Must be one of: {choices}")
    return value


def merge_options(flags: Dict[str, Any], file_values: Dict[str, Any]) -> Dict[str, Any]:
    """Flags that were given override values from the config file."""
    merged = dict(file_values)
    merged.update({k: v for k, v in flags.items() if v is not None})
    return merged
