import dataclasses
import os
import typing

from utils.utils import read_yaml_file, get, unknown_keys_error, config_error

DEFAULTS_FILE_PATH = os.path.join(os.path.dirname(__file__), "defaults.yaml")

DEFAULTS: dict[str, typing.Any] = read_yaml_file(DEFAULTS_FILE_PATH)

SECTIONS = ("corpus", "sgns", "mel", "joint", "eval", "run")

T = typing.TypeVar("T")


def get_default(key_path: str) -> typing.Any:
    return get(DEFAULTS, key_path)


def load_section(cls: type[T], section: str, overrides: typing.Optional[dict[str, typing.Any]] = None) -> T:
    """Build a config dataclass from the defaults file, with `overrides` layered on top.

    Keys in `overrides` that are not fields of `cls` are rejected.
    """
    if not dataclasses.is_dataclass(cls):
        raise TypeError(f"{cls.__name__} is not a dataclass")

    overrides = overrides or {}
    field_names = {field.name for field in dataclasses.fields(cls)}

    unknown = set(overrides) - field_names
    if len(unknown) > 0:
        raise unknown_keys_error(section, unknown)

    values = {key: value for key, value in get_default(section).items() if key in field_names}
    values.update(overrides)

    try:
        return cls(**values)
    except (TypeError, ValueError) as e:
        raise config_error(f"{section}: {e}")


def as_dict(config: typing.Any) -> dict[str, typing.Any]:
    """Plain-data echo of a config dataclass, for manifests and checkpoints."""
    result: dict[str, typing.Any] = {}
    for key, value in dataclasses.asdict(config).items():
        if hasattr(value, "value"):
            value = value.value
        elif isinstance(value, (tuple, frozenset, set)):
            value = sorted(value) if isinstance(value, (frozenset, set)) else list(value)
        result[key] = value
    return result
