"""
Test version utilities functionality.
"""

import unittest
import os
import sys
import json
import tempfile
import shutil

# Add src directory to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(__file__)), 'src'))

from version import FALLBACK, get_version_display, get_version_info, get_version_string


class TestVersionUtilities(unittest.TestCase):
    """Test version utilities."""

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.test_dir, ignore_errors=True)

    def create_test_version_file(self, version_data):
        """Create a test version.json file."""
        version_file = os.path.join(self.test_dir, 'version.json')
        with open(version_file, 'w') as f:
            json.dump(version_data, f)
        return version_file

    def test_get_version_info_valid_file(self):
        version_file = self.create_test_version_file({"major": 1, "minor": 4, "patch": 2, "pre": ""})
        result = get_version_info(version_file)
        self.assertEqual((result['major'], result['minor'], result['patch']), (1, 4, 2))
        self.assertEqual(result['pre'], "")

    def test_get_version_info_missing_pre_defaults_to_empty(self):
        version_file = self.create_test_version_file({"major": 1, "minor": 0, "patch": 0})
        self.assertEqual(get_version_info(version_file)['pre'], "")

    def test_get_version_info_missing_file(self):
        result = get_version_info(os.path.join(self.test_dir, 'nope.json'))
        self.assertEqual(result, FALLBACK)

    def test_get_version_info_invalid_json(self):
        version_file = os.path.join(self.test_dir, 'version.json')
        with open(version_file, 'w') as f:
            f.write("invalid json content")
        self.assertEqual(get_version_info(version_file), FALLBACK)

    def test_get_version_info_missing_fields(self):
        version_file = self.create_test_version_file({"major": 1})
        self.assertEqual(get_version_info(version_file), FALLBACK)

    def test_get_version_string_no_pre(self):
        version_file = self.create_test_version_file({"major": 0, "minor": 3, "patch": 1, "pre": ""})
        self.assertEqual(get_version_string(version_file), "0.3.1")

    def test_get_version_string_with_pre(self):
        version_file = self.create_test_version_file({"major": 0, "minor": 3, "patch": 1, "pre": "rc1"})
        self.assertEqual(get_version_string(version_file), "0.3.1-rc1")

    def test_repository_version_is_readable(self):
        """The shipped version.json parses and yields a dotted version."""
        self.assertRegex(get_version_string(), r"^\d+\.\d+\.\d+")
        self.assertTrue(get_version_display().startswith("cipwave "))


if __name__ == '__main__':
    unittest.main()
