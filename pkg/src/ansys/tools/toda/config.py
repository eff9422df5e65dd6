# Copyright (C) 2025 ANSYS, Inc. and/or its affiliates.
# SPDX-License-Identifier: MIT
#
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.

"""
Persistent settings: tolerances, bounds and thread count.

Settings live in a JSON file inside the user data directory. Values not present in the file
fall back to :data:`DEFAULTS`. The thread count can also be set through the
``ANSYS_TOOLS_TODA_THREADS`` environment variable, which wins over the file.

WARNING: This is not concurrent-safe (multiple python processes might race on this data.)
"""

import json
import logging
import os
from typing import Any, Dict, Literal, Union
import warnings

import platformdirs

from ansys.tools.toda.errors import DomainError

LOG = logging.getLogger(__name__)

SETTINGS_DIR = platformdirs.user_data_dir(appname="ansys_tools_toda", appauthor="Ansys")
CONFIG_FILE_NAME = "config.json"
CONFIG_FILE = os.path.join(SETTINGS_DIR, CONFIG_FILE_NAME)

THREADS_ENV_VAR = "ANSYS_TOOLS_TODA_THREADS"

DEFAULTS: Dict[str, Any] = {
    "cyclic_tolerance": 1e-12,
    "rank_tolerance": 1e-9,
    "blowup_bound": 1e12,
    "reality_tolerance": 1e-10,
    "bracket_tolerance": 1e-12,
    "sampled_triples": 10_000,
    "exhaustive_jacobi_dim": 60,
    "brute_force_nodes": 9,
    "num_threads": 1,
    "seed": 0,
}

SETTING_TYPE = Literal[
    "cyclic_tolerance",
    "rank_tolerance",
    "blowup_bound",
    "reality_tolerance",
    "bracket_tolerance",
    "sampled_triples",
    "exhaustive_jacobi_dim",
    "brute_force_nodes",
    "num_threads",
    "seed",
]


def _read_config_file() -> Dict[str, Any]:
    """Read config file to object."""
    if not os.path.isfile(CONFIG_FILE):
        return {}
    with open(CONFIG_FILE, "r") as f:
        content = f.read()
    if not content:
        return {}
    try:
        return json.loads(content)
    except json.JSONDecodeError:
        warnings.warn(f"Ignoring unreadable settings file {CONFIG_FILE}")
        return {}


def _write_config_file(config_data: Dict[str, Any]) -> None:
    if not os.path.isdir(SETTINGS_DIR):
        LOG.debug(f"Created settings directory: {SETTINGS_DIR}")
        os.makedirs(SETTINGS_DIR)
    with open(CONFIG_FILE, "w") as f:
        f.write(json.dumps(config_data, indent=2, sort_keys=True))


def _validate(name: str, value: Any) -> Any:
    if name not in DEFAULTS:
        raise DomainError(f"Unknown setting '{name}'. Valid settings are {sorted(DEFAULTS)}")
    default = DEFAULTS[name]
    try:
        value = type(default)(value)
    except (TypeError, ValueError):
        raise DomainError(f"Setting '{name}' expects a {type(default).__name__}, got {value!r}")
    if name != "seed" and value <= 0:
        raise DomainError(f"Setting '{name}' must be positive, got {value}")
    return value


def get_settings() -> Dict[str, Any]:
    """Return the effective settings.

    Returns
    -------
    dict
        :data:`DEFAULTS` updated with the saved settings and the thread override taken from the
        environment.
    """
    settings = dict(DEFAULTS)
    for name, value in _read_config_file().items():
        try:
            settings[name] = _validate(name, value)
        except (DomainError, TypeError, ValueError):
            LOG.warning(f"Ignoring invalid saved setting {name}={value!r}")
    env_threads = os.environ.get(THREADS_ENV_VAR, "")
    if env_threads:
        try:
            settings["num_threads"] = _validate("num_threads", env_threads)
        except (DomainError, ValueError):
            LOG.warning(f"Ignoring invalid {THREADS_ENV_VAR}={env_threads!r}")
    return settings


def get_setting(name: SETTING_TYPE) -> Any:
    """Return a single effective setting."""
    return get_settings()[name]


def save_setting(name: SETTING_TYPE, value: Any) -> None:
    """Persist a setting in the configuration file.

    Parameters
    ----------
    name : str
        One of the keys of :data:`DEFAULTS`.
    value : int or float
        New value. It must be positive, except for ``seed``.

    Raises
    ------
    DomainError
        Unknown setting or invalid value.
    """
    config = _read_config_file()
    config[name] = _validate(name, value)
    _write_config_file(config)
    LOG.debug(f"Saved setting {name}={config[name]!r} to {CONFIG_FILE}")


def clear_configuration(name: Union[SETTING_TYPE, Literal["all"]] = "all") -> None:
    """Remove saved settings so that defaults apply again.

    Parameters
    ----------
    name : str, optional
        Setting to clear, or ``"all"``.
    """
    config = _read_config_file()
    if name == "all":
        _write_config_file({})
        return
    if name in config:
        del config[name]
    _write_config_file(config)


def num_threads() -> int:
    """Number of worker threads for grid computations."""
    return int(get_setting("num_threads"))
