"""Config files for the command line.

A config file supplies option defaults; flags given on the command line
always win. Three layouts are understood, picked by suffix:

``.yaml`` / ``.yml``::

    seed: 7
    k: 4
    detect:
      beta: 2.0

``.toml``::

    seed = 7
    [bench]
    seeds = [1, 2, 3]

anything else, ``key=value`` lines (``#`` starts a comment, a ``command.`` key
prefix scopes a value to one command)::

    seed=7
    detect.beta=2.0
    bench.methods=humor,cut-esn

Top-level keys apply to every command that has an option of that name.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import click
import tomlkit
import yaml
from tomlkit.exceptions import TOMLKitError

from .errors import ConfigError

logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    """tomlkit items to plain Python values."""
    if hasattr(value, "unwrap"):
        return value.unwrap()
    return value


class ConfigLoader:
    """Loads a config file into a nested ``{command: {option: value}}`` mapping."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)

    def load(self) -> Dict[str, Any]:
        if not self.path.exists():
            raise ConfigError(f"config file not found: {self.path}")
        suffix = self.path.suffix.lower()
        try:
            if suffix in (".yaml", ".yml"):
                data = self._load_yaml()
            elif suffix == ".toml":
                data = self._load_toml()
            else:
                data = self._load_key_value()
        except (yaml.YAMLError, TOMLKitError) as e:
            raise ConfigError(f"{self.path}: {e}")
        except UnicodeDecodeError as e:
            raise ConfigError(f"{self.path}: not valid UTF-8 ({e.reason} at byte {e.start})")
        except OSError as e:
            raise ConfigError(f"{self.path}: cannot read ({e.strerror or e})")
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ConfigError(f"{self.path}: top level must be a mapping")
        logger.debug(f"Loaded {len(data)} config entries from {self.path}")
        return data

    def _load_yaml(self) -> Any:
        with open(self.path, "r", encoding="utf-8") as f:
            return yaml.safe_load(f)

    def _load_toml(self) -> Any:
        with open(self.path, "r", encoding="utf-8") as f:
            return _plain(tomlkit.load(f))

    def _load_key_value(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {}
        with open(self.path, "r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{self.path}:{lineno}: expected key=value")
                key, value = (part.strip() for part in line.split("=", 1))
                if "." in key:
                    command, key = key.split(".", 1)
                    data.setdefault(command, {})[key] = value
                else:
                    data[key] = value
        return data


def _option_key(name: str) -> str:
    return name.strip().replace("-", "_")


def _coerce(param: click.Parameter, value: Any) -> Any:
    if param.multiple and isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    if param.multiple and isinstance(value, Mapping):
        return [f"{k}={v}" for k, v in value.items()]
    return value


def build_default_map(group: click.Group, raw: Mapping[str, Any]) -> Dict[str, Dict[str, Any]]:
    """Turn a loaded config mapping into a click ``default_map`` for ``group``.

    Raises:
        ConfigError: A key matches no option of any command.
    """
    commands = group.commands
    params = {
        name: {p.name: p for p in cmd.params if p.name}
        for name, cmd in commands.items()
    }
    shared = {}
    scoped: Dict[str, Dict[str, Any]] = {}
    for key, value in raw.items():
        command = key.strip().replace("_", "-")
        if command in commands and isinstance(value, Mapping):
            scoped[command] = {_option_key(k): v for k, v in value.items()}
        else:
            shared[_option_key(key)] = value

    default_map: Dict[str, Dict[str, Any]] = {}
    used = set()
    for name, options in params.items():
        entries = {}
        for key, value in list(shared.items()) + list(scoped.get(name, {}).items()):
            if key in options:
                entries[key] = _coerce(options[key], value)
                used.add(key)
            elif key in scoped.get(name, {}):
                raise ConfigError(f"command {name!r} has no option {key!r}")
        if entries:
            default_map[name] = entries

    unknown = sorted(set(shared) - used)
    if unknown:
        raise ConfigError(f"config key {unknown[0]!r} matches no command option")
    return default_map


def load_default_map(
    group: click.Group, path: Optional[Union[str, Path]]
) -> Optional[Dict[str, Dict[str, Any]]]:
    if path is None:
        return None
    return build_default_map(group, ConfigLoader(path).load())
