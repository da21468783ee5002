"""
Version information utilities for cipwave.

This module provides access to version information from version.json
"""

import json

from packaging.version import InvalidVersion, Version

from constants import VERSION_PATH
from logger import get_logger

logger = get_logger()

FALLBACK = {"major": 0, "minor": 1, "patch": 0, "pre": ""}


def get_version_info(version_file=None):
    """
    Read version information from version.json in the root directory.

    Returns:
        dict: Version information with major, minor, patch, and pre fields
    """
    version_file = version_file or VERSION_PATH
    try:
        with open(version_file, 'r') as f:
            version_data = json.load(f)

        for field in ('major', 'minor', 'patch'):
            if field not in version_data:
                raise ValueError(f"Missing required field '{field}' in version.json")

        if 'pre' not in version_data:
            version_data['pre'] = ""

        return version_data

    except FileNotFoundError:
        logger.warning(f"version.json not found at {version_file}")
        return dict(FALLBACK)

    except json.JSONDecodeError as e:
        logger.error(f"Error parsing version.json: {e}")
        return dict(FALLBACK)

    except Exception as e:
        logger.error(f"Error reading version.json: {e}")
        return dict(FALLBACK)


def get_version_string(version_file=None):
    """
    Get the version as a formatted string.

    Returns:
        str: "major.minor.patch" or "major.minor.patch-pre"
    """
    info = get_version_info(version_file)
    version_str = f"{info['major']}.{info['minor']}.{info['patch']}"
    if info.get('pre'):
        version_str += f"-{info['pre']}"
    try:
        Version(version_str)
    except InvalidVersion:
        logger.warning(f"version.json yields a non PEP 440 version: {version_str}")
    return version_str


def get_version_display():
    return f"cipwave {get_version_string()}"
