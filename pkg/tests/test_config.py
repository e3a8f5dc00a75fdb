import os
import tempfile
import unittest

from pycyclic.config import RunConfig, parse_window, rng
from pycyclic.errors import ParseError, ValidationFailed


class TestWindow(unittest.TestCase):
    def test_parse(self):

        self.assertEqual(parse_window("-6..0"), (-6, 0))
        self.assertEqual(parse_window("2..-1"), (2, -1))
        for text in ("-6:0", "a..b", "1..2..3"):
            with self.assertRaises(ParseError, msg=text):
                parse_window(text)


class TestRunConfig(unittest.TestCase):
    def test_defaults(self):

        config = RunConfig(builtin="ground", K=4, window="-2..0")
        self.assertEqual(config.window, (-2, 0))
        self.assertEqual(list(config.degrees()), [-2, -1, 0])
        self.assertEqual(list(RunConfig(K=4, window=(1, 0)).degrees()), [])
        self.assertEqual(config.theory, "lambda")

    def test_validation(self):

        for values in ({"K": 0}, {"cutoff": 0}, {"kmax": 1}, {"theory": "cyclic"}, {"arity_cap": 0}):
            with self.assertRaises(ValidationFailed, msg=str(values)):
                RunConfig(**values)

    def test_unknown_keys(self):

        with self.assertRaises(ParseError):
            RunConfig.from_dict({"K": 3, "namespace": "default"})

    def test_yaml(self):

        config = RunConfig(builtin="sphere(2)", K=3, window=(-4, 1), seed=7, cohomological=True)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "run.yml")
            config.to_yaml(path)
            self.assertEqual(RunConfig.from_yaml(path), config)
            with open(path, "w", encoding="utf-8") as stream:
                stream.write("K: 3\nwindow: [\n")
            with self.assertRaises(ParseError):
                RunConfig.from_yaml(path)

    def test_rng_streams(self):

        config = RunConfig(K=3, seed=11)
        self.assertEqual(config.rng("bv").random(), rng(11, "bv").random())
        self.assertNotEqual(rng(11, "bv").random(), rng(11, "gravity").random())
        self.assertNotEqual(rng(11, "bv").random(), rng(12, "bv").random())


if __name__ == "__main__":
    unittest.main()
