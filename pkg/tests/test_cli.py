import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stdout

from pycyclic.cli import EXIT_FAILED, EXIT_OK, EXIT_PARSE, build_parser, config_from_args, main
from pycyclic.config import RunConfig


def run(*argv):
    buffer = io.StringIO()
    with redirect_stdout(buffer):
        status = main(list(argv))
    return status, buffer.getvalue()


class TestArguments(unittest.TestCase):
    def test_negative_window(self):

        status, out = run("hh", "--builtin", "ground", "--K", "2", "--window", "-1..0", "--json")
        self.assertEqual(status, EXIT_OK)
        rows = json.loads(out)["meta"]["rows"]
        self.assertEqual([row["degree"] for row in rows], [-1, 0])
        self.assertEqual([row["dimension"] for row in rows], [0, 1])

    def test_config_file(self):

        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "run.yml")
            RunConfig(builtin="sphere(2)", K=2, window=(-2, 0), seed=3).to_yaml(path)
            args = build_parser().parse_args(["hc", "--config", path, "--K", "3"])
            config = config_from_args(args)
        self.assertEqual((config.builtin, config.K, config.window, config.seed), ("sphere(2)", 3, (-2, 0), 3))

    def test_parse_errors(self):

        self.assertEqual(run("hh", "--builtin", "ground", "--window", "0:1")[0], EXIT_PARSE)
        self.assertEqual(run("trees", "show", "1(2()")[0], EXIT_PARSE)

    def test_library_errors(self):

        self.assertEqual(run("hh", "--builtin", "torus", "--K", "2")[0], EXIT_FAILED)
        self.assertEqual(run("hc", "--K", "2")[0], EXIT_FAILED)


class TestCommands(unittest.TestCase):
    def test_trees_enumerate(self):

        status, out = run("trees", "enumerate", "--n", "3")
        self.assertEqual(status, EXIT_OK)
        self.assertIn("# count: 3", out.splitlines())

    def test_trees_show(self):

        status, out = run("trees", "show", "1(>2())")
        self.assertEqual(status, EXIT_OK)
        self.assertIn("-1 1(^ 2())", out)
        self.assertIn("+1 2(^ 1())", out)

    def test_hclambda(self):

        status, out = run("hclambda", "--builtin", "ground", "--K", "3", "--window", "-3..0", "--json")
        self.assertEqual(status, EXIT_OK)
        dims = [row["dimension"] for row in json.loads(out)["meta"]["rows"]]
        self.assertEqual(dims, [0, 1, 0, 1])

    def test_check_writes_the_summary(self):

        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "summary.json")
            status, out = run("check", "--builtin", "sphere(2)", "--K", "2", "--samples", "5", "--out", path)
            with open(path, "r", encoding="utf-8") as stream:
                summary = json.load(stream)
        self.assertEqual(status, EXIT_OK)
        self.assertTrue(summary["passed"])
        self.assertEqual(summary["meta"]["config"]["K"], 2)
        self.assertTrue(out.startswith("# axioms of sphere(2)"))

    def test_theta_report(self):

        status, _ = run("theta-report", "--builtin", "ground", "--K", "2", "--window", "-1..0")
        self.assertEqual(status, EXIT_OK)

    def test_brace(self):

        for tails in ("6", "0"):
            status, out = run(
                "brace", "--builtin", "sphere(2)", "--vertices", "2", "--tails", tails,
                "--cases", "6", "--invariance-cases", "6", "--json",
            )
            self.assertEqual(status, EXIT_OK, tails)
            summary = json.loads(out)
            details = {c["name"]: c.get("detail") for c in summary["checks"]}
            self.assertGreater(summary["meta"]["trees"], 0)
            if tails != "0":
                self.assertIn("sweep/equivalence/rho route equals nu route", details)
            signs = details["enumerated/sign of t is (-1)^(path length)"]
            self.assertNotEqual(signs, "0 trees")


if __name__ == "__main__":
    unittest.main()
