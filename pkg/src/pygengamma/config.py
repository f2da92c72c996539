"""
Config
Numerical defaults shipped with the package (defaults.json), optionally
deep-merged with the file named by the G2G_DEFAULTS environment variable.
"""

import copy
import json
import logging
import os
from pathlib import Path

from pygengamma.errors import ConfigError
from pygengamma.quadcore import QuadConfig

logger = logging.getLogger(__name__)

ENV_VAR = "G2G_DEFAULTS"
DEFAULTS_PATH = Path(__file__).with_name("defaults.json")
REQUIRED_SECTIONS = ("quad", "grid", "corpus", "tolerances")


def read_json(path):
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError as exc:
        raise ConfigError("configuration file not found: {}".format(path)) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("{} is not valid JSON: {}".format(path, exc)) from exc


def deep_merge(base, override):
    """Recursively merge override into a copy of base; lists are replaced, not merged."""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def validate(defaults):
    if not isinstance(defaults, dict):
        raise ConfigError("defaults must be a JSON object")
    missing = [name for name in REQUIRED_SECTIONS if name not in defaults]
    if missing:
        raise ConfigError("defaults lack the section(s): {}".format(", ".join(missing)))
    quad_config(defaults)
    corpus = defaults["corpus"]
    if not isinstance(corpus, list) or not corpus:
        raise ConfigError("corpus must be a nonempty list")
    for i, entry in enumerate(corpus):
        if not isinstance(entry, dict) or "f" not in entry or "g" not in entry:
            raise ConfigError("corpus entry {} needs 'f' and 'g'".format(i))
    for axis in ("alpha", "beta", "gamma"):
        if not defaults["grid"].get(axis):
            raise ConfigError("grid.{} must be a nonempty list".format(axis))
    return defaults


def load_defaults(path=None, env=None):
    """
    Packaged defaults, merged with the override file named by G2G_DEFAULTS
    (or `path` when given).

    Raises
    ------
    ConfigError
        When a file is missing, is not valid JSON or lacks a required section.
    """
    defaults = read_json(DEFAULTS_PATH)
    env = os.environ if env is None else env
    override = path or env.get(ENV_VAR)
    if override:
        logger.debug("merging defaults override %s", override)
        data = read_json(override)
        if not isinstance(data, dict):
            raise ConfigError("{} must contain a JSON object".format(override))
        defaults = deep_merge(defaults, data)
    return validate(defaults)


def load_corpus(path):
    """Function corpus override: a JSON list of {name, f, g[, fprime, gprime]} entries."""
    data = read_json(path)
    if isinstance(data, dict):
        data = data.get("corpus")
    if not isinstance(data, list) or not data:
        raise ConfigError("{} must hold a nonempty corpus list".format(path))
    for i, entry in enumerate(data):
        if not isinstance(entry, dict) or "f" not in entry or "g" not in entry:
            raise ConfigError("corpus entry {} needs 'f' and 'g'".format(i))
        entry.setdefault("name", "entry{}".format(i))
    return data


def quad_config(defaults, **overrides):
    values = dict(defaults["quad"])
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return QuadConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError("invalid quadrature settings: {}".format(exc)) from exc
