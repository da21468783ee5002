import json
import os
import shutil

from constants import TEMPLATE_CONFIG_PATH
from logger import get_logger

# User config lives next to the project checkout, the template is read-only
USER_CONFIG_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIG_PATH = os.path.join(USER_CONFIG_DIR, 'cipwave_config.json')

logger = get_logger()

DEFAULTS = {
    "P_MAX": 13,
    "EXPANSION_P_MAX": 8,
    "HERMITIAN_TOL": 1e-10,
    "ROOT_RTOL": 1e-14,
    "BRACKET_START": 1e-3,
    "BRACKET_CAP": 0.4,
    "PREASYMPTOTIC_LIMIT": 1.2,
    "CONDITION_GUARD": 1e-8,
    "THETA_STEPS_2D": 64,
    "THETA_STEPS_3D": 16,
    "GAMMA_OPT_WINDOW": 1e3,
    "SOLVER_RESIDUAL_TOL": 1e-10,
    "CRITICAL_N_START": 4,
    "CRITICAL_N_MAX": 4096,
    "WORKERS": 1,
    "LOG_LEVEL": "INFO",
}

_cache = {}


def load_config(path=None, use_template=True):
    """
    Read the JSON configuration, creating the user copy from the template on
    first use. Missing keys fall back to DEFAULTS; unreadable files are
    logged and replaced by DEFAULTS.
    """
    path = path or CONFIG_PATH
    if use_template and not os.path.exists(path) and os.path.exists(TEMPLATE_CONFIG_PATH):
        try:
            shutil.copy2(TEMPLATE_CONFIG_PATH, path)
            logger.info(f"Created user config from template: {path}")
        except Exception as e:
            logger.warning(f"Could not copy template config: {e}")

    config = {}
    if os.path.exists(path):
        try:
            with open(path, "r") as f:
                config = json.load(f)
            if not isinstance(config, dict):
                logger.error(f"Config file {path} does not hold a JSON object")
                config = {}
        except Exception as e:
            logger.error(f"Error reading config file: {e}")
            config = {}

    for key, value in DEFAULTS.items():
        config.setdefault(key, value)
    return config


def save_config(config, path=None):
    path = path or CONFIG_PATH
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w") as f:
            json.dump(config, f, indent=2)
        logger.info(f"Config saved to: {path}")
    except Exception as e:
        logger.error(f"Error saving config to {path}: {e}")
        fallback_path = os.path.join(os.path.expanduser('~'), 'cipwave_config.json')
        try:
            with open(fallback_path, "w") as f:
                json.dump(config, f, indent=2)
            logger.info(f"Config saved to fallback location: {fallback_path}")
        except Exception as fallback_error:
            logger.error(f"Failed to save config to fallback location: {fallback_error}")
            raise
    _cache.clear()


def get_setting(key):
    """Cached single-key lookup used by the numeric modules."""
    if "config" not in _cache:
        _cache["config"] = load_config(use_template=False)
    return _cache["config"].get(key, DEFAULTS.get(key))


def override(config):
    """Replace the cached configuration (cli --config, tests)."""
    merged = dict(DEFAULTS)
    merged.update(config or {})
    _cache["config"] = merged
    return merged


def reset():
    _cache.clear()
