import hashlib
import os
import typing

import yaml


class MweException(Exception):
    def __init__(self, message: str, path: str | None = None, line_num: int | None = None):
        self.path = path
        self.line_num = line_num
        super().__init__(message)


class ConfigError(MweException):
    pass


class DataFormatError(MweException):
    pass


class VocabularyError(MweException):
    pass


class MetricUndefinedError(MweException):
    pass


# Errors the user can fix by changing inputs or flags. The CLI maps these to exit code 2.
USER_ERRORS: tuple[type[Exception], ...] = (
    ConfigError, DataFormatError, VocabularyError, MetricUndefinedError, FileNotFoundError
)


def read_yaml_file(path: str) -> typing.Any:
    with open(path, "r", encoding="utf-8") as file:
        return yaml.safe_load(file)


def get(dictionary: dict[str, typing.Any], key_path: str) -> typing.Any:
    """Find a value in a recursive dictionary structure (i.e., dictionaries within dictionaries).

    key_path is a list of keys in order from the top level to the bottom level, separated by periods. For example,
    "sgns.dim" looks up the "sgns" section and then the "dim" key inside it.
    """
    value: typing.Any = dictionary
    for key in key_path.split("."):
        value = value[key]
    return value


def file_checksum(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as file:
        for block in iter(lambda: file.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def path_checksum(path: str) -> str:
    """sha256 of a file, or of the sorted (name, checksum) listing of a directory."""
    if not os.path.isdir(path):
        return file_checksum(path)
    digest = hashlib.sha256()
    for name in sorted(os.listdir(path)):
        digest.update(f"{name}\t{path_checksum(os.path.join(path, name))}\n".encode("utf-8"))
    return digest.hexdigest()


def config_error(description: str) -> ConfigError:
    return ConfigError(f"invalid configuration: {description}")


def unknown_keys_error(section: str, keys: typing.Iterable[str]) -> ConfigError:
    return config_error(f"unknown keys in '{section}': {', '.join(sorted(keys))}")


def parse_error(path: str, line_num: int, description: str) -> DataFormatError:
    return DataFormatError(f"Error in {path} at line {line_num}: {description}", path, line_num)


def missing_file_error(path: str) -> ConfigError:
    return ConfigError(f"file not found: {path}", path)


def duplicate_token_error(token: str, path: str | None = None, line_num: int | None = None) -> VocabularyError:
    if path is not None and line_num is not None:
        return VocabularyError(f"Error in {path} at line {line_num}: duplicate token '{token}'", path, line_num)
    return VocabularyError(f"duplicate token '{token}'")


def oov_error(tokens: typing.Iterable[str]) -> VocabularyError:
    return VocabularyError(f"out-of-vocabulary tokens: {', '.join(tokens)}")


def zero_norm_error() -> ValueError:
    return ValueError("zero-norm vector")


def dimension_error(expected: int, actual: int) -> ValueError:
    return ValueError(f"dimension mismatch: expected {expected}, got {actual}")
