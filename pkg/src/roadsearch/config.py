"""Configuration files for the harness.

A config file is a JSON object with up to four sections -- ``search``,
``road``, ``vehicle`` and ``sut`` -- whose keys mirror the corresponding
parameter dataclasses. Every key is optional (an empty file means "all
defaults"); unknown keys are an error so typos cannot silently change a
run. ``map_size`` lives in the ``road`` section and is shared with the
search's genotype domain.
"""
from __future__ import annotations

import json
from dataclasses import fields

from .road import RoadParams
from .search import SearchConfig
from .simulator import VehicleParams
from .protocol import SutDescriptor

__all__ = ["ConfigError", "parse_config", "parse_config_dict", "serialize_config"]

_SECTIONS = {
    "search": SearchConfig,
    "road": RoadParams,
    "vehicle": VehicleParams,
    "sut": SutDescriptor,
}

# search.map_size is not a file key; it is copied from road.map_size
_HIDDEN = {"search": {"map_size"}}


class ConfigError(ValueError):
    """Configuration problem; the message names the offending key path."""


def _allowed_keys(section: str) -> set:
    cls = _SECTIONS[section]
    return {f.name for f in fields(cls)} - _HIDDEN.get(section, set())


def parse_config_dict(data: dict):
    """Validate a config dictionary.

    Returns ``(SearchConfig, RoadParams, VehicleParams, SutDescriptor)``
    with every omitted key at its documented default.
    """
    if not isinstance(data, dict):
        raise ConfigError("top level: expected a JSON object")
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")

    parsed = {}
    for section, cls in _SECTIONS.items():
        raw = data.get(section, {})
        if not isinstance(raw, dict):
            raise ConfigError(f"{section}: expected an object")
        allowed = _allowed_keys(section)
        unknown = set(raw) - allowed
        if unknown:
            key = sorted(unknown)[0]
            raise ConfigError(f"{section}.{key}: unknown key")
        try:
            parsed[section] = cls(**raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{section}: {exc}") from exc

    parsed["search"].map_size = parsed["road"].map_size
    return (parsed["search"], parsed["road"], parsed["vehicle"], parsed["sut"])


def parse_config(path):
    """Load and validate a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not text.strip():
        data = {}
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return parse_config_dict(data)


def serialize_config(search: SearchConfig, road: RoadParams,
                     vehicle: VehicleParams, sut: SutDescriptor) -> dict:
    """Inverse of :func:`parse_config_dict`: parse(serialize(c)) == c."""
    out = {}
    for section, obj in (("search", search), ("road", road),
                         ("vehicle", vehicle), ("sut", sut)):
        out[section] = {
            f.name: getattr(obj, f.name)
            for f in fields(obj)
            if f.name not in _HIDDEN.get(section, set())
        }
    return out
