"""Parsing helpers for the compact ``kind:params`` specification grammar.

A spec looks like ``fourier:P=6.2831853,a1=1`` or ``const:1``. Parameters are
comma separated ``key=value`` pairs; a single bare value is stored under the
key ``value``.
"""

from typing import Dict, Iterable, Tuple

from core.exceptions import ConfigurationError


def split_spec(spec: str) -> Tuple[str, Dict[str, str]]:
    """
    Split a spec into its kind and raw parameter strings.

    Args:
        spec: Text of the form ``kind`` or ``kind:params``.

    Returns:
        The lower-cased kind and a mapping of parameter names to raw values.
    """
    if not spec or not spec.strip():
        raise ConfigurationError("Empty function specification")

    kind, _, body = spec.strip().partition(":")
    kind = kind.strip().lower()
    params: Dict[str, str] = {}
    if not body.strip():
        return kind, params

    for item in body.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition("=")
        if not sep:
            if "value" in params:
                raise ConfigurationError(f"Ambiguous bare parameter '{item}' in '{spec}'")
            params["value"] = key.strip()
            continue
        params[key.strip()] = value.strip()
    return kind, params


def to_float(params: Dict[str, str], key: str, default: float | None = None) -> float:
    """Read a float parameter, raising a configuration error on bad input."""
    if key not in params:
        if default is None:
            raise ConfigurationError(f"Missing required parameter '{key}'")
        return default
    try:
        return float(params[key])
    except ValueError as e:
        raise ConfigurationError(
            f"Parameter '{key}' expects a number, got '{params[key]}'"
        ) from e


def to_int(params: Dict[str, str], key: str, default: int | None = None) -> int:
    """Read an integer parameter."""
    value = to_float(params, key, None if default is None else float(default))
    if value != int(value):
        raise ConfigurationError(f"Parameter '{key}' expects an integer, got {value}")
    return int(value)


def reject_unknown(params: Dict[str, str], allowed: Iterable[str], kind: str) -> None:
    """Raise if ``params`` carries keys outside ``allowed``."""
    unknown = sorted(set(params) - set(allowed))
    if unknown:
        raise ConfigurationError(
            f"Unknown parameter(s) {', '.join(unknown)} for kind '{kind}'"
        )
