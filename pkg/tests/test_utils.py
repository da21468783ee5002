import unittest
import sys
import os

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from sympy.polys.domains import QQ

from errors import DegenerateInput
from utils import (
    format_float,
    format_rational,
    is_valid_epsilon,
    is_valid_gamma_rule,
    is_valid_order,
    parse_float_list,
    parse_int_range,
    resource_path,
)


class TestUtils(unittest.TestCase):
    def test_is_valid_order(self):
        self.assertTrue(is_valid_order(1))
        self.assertTrue(is_valid_order(13))
        self.assertFalse(is_valid_order(0))
        self.assertFalse(is_valid_order(14))
        self.assertFalse(is_valid_order(2.0))
        self.assertFalse(is_valid_order(True))
        self.assertTrue(is_valid_order(5, p_max=5))
        self.assertFalse(is_valid_order(6, p_max=5))

    def test_is_valid_gamma_rule(self):
        for rule in ("fem", "gamma0", "gamma-opt", "-0.01", "0", 1e-3):
            self.assertTrue(is_valid_gamma_rule(rule), rule)
        for rule in ("gamma", "", None, "1/12"):
            self.assertFalse(is_valid_gamma_rule(rule), rule)

    def test_is_valid_epsilon(self):
        self.assertTrue(is_valid_epsilon(0.5))
        self.assertTrue(is_valid_epsilon("0.1"))
        self.assertFalse(is_valid_epsilon(0))
        self.assertFalse(is_valid_epsilon(1))
        self.assertFalse(is_valid_epsilon("half"))

    def test_parse_int_range(self):
        self.assertEqual(parse_int_range("3"), [3])
        self.assertEqual(parse_int_range("1..4"), [1, 2, 3, 4])
        self.assertEqual(parse_int_range("1,2,5"), [1, 2, 5])
        with self.assertRaises(DegenerateInput):
            parse_int_range("4..1")
        with self.assertRaises(DegenerateInput):
            parse_int_range("")
        with self.assertRaises(DegenerateInput):
            parse_int_range("a,b")

    def test_parse_float_list(self):
        self.assertEqual(parse_float_list("100"), [100.0])
        self.assertEqual(parse_float_list("0.1,0.2"), [0.1, 0.2])
        self.assertEqual(parse_float_list("100*2^0..4"), [100.0, 200.0, 400.0, 800.0, 1600.0])
        self.assertEqual(parse_float_list("0.01*2^-2..0"), [0.0025, 0.005, 0.01])
        with self.assertRaises(DegenerateInput):
            parse_float_list("1*2^3..1")
        with self.assertRaises(DegenerateInput):
            parse_float_list("x")

    def test_format_float(self):
        self.assertEqual(format_float(0.1), "0.10000000000000001")
        self.assertEqual(format_float(2), "2")
        self.assertEqual(format_float(-1.0 / 12), "-0.083333333333333329")

    def test_format_rational(self):
        self.assertEqual(format_rational(QQ(1, 720)), "1/720")
        self.assertEqual(format_rational(QQ(-1, 12)), "-1/12")
        self.assertEqual(format_rational(QQ(3)), "3")

    def test_resource_path_points_into_repo(self):
        self.assertTrue(os.path.exists(resource_path('version.json')))
        self.assertTrue(os.path.exists(resource_path('config/cipwave_config.json')))


if __name__ == '__main__':
    unittest.main()
