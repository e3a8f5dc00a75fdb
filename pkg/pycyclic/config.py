import os
import random
from dataclasses import asdict, dataclass, field, fields
from typing import Dict, Optional, Tuple

import yaml
from loguru import logger

from pycyclic.errors import ParseError, ValidationFailed

THEORIES = ("lambda", "negative", "periodic", "positive")


def parse_window(text: str) -> Tuple[int, int]:
    """Parses a degree window written `a..b` (a and b may be negative)"""
    parts = str(text).split("..")
    if len(parts) != 2:
        raise ParseError(f"window {text!r} is not of the form a..b", 1, 1)
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"window {text!r} has non-integer bounds", 1, 1)


def _default_window() -> Tuple[int, int]:
    return parse_window(os.getenv("PYCYCLIC_WINDOW", default="-6..0"))


@dataclass
class RunConfig:
    builtin: Optional[str] = None
    file: Optional[str] = None
    K: int = field(default_factory=lambda: int(os.getenv("PYCYCLIC_K", default="6")))
    arity_cap: int = 3
    window: Tuple[int, int] = field(default_factory=_default_window)
    theory: str = "lambda"
    seed: int = field(
        default_factory=lambda: int(os.getenv("PYCYCLIC_SEED", default="0"))
    )
    out: Optional[str] = None
    kmax: int = 3
    cohomological: bool = False
    samples: int = 20
    cutoff: int = 1

    def __post_init__(self):
        if isinstance(self.window, str):
            self.window = parse_window(self.window)
        self.window = (int(self.window[0]), int(self.window[1]))
        self.validate()

    def validate(self):
        problems = []
        if self.K < 1:
            problems.append(f"K must be at least 1, got {self.K}")
        if self.arity_cap < 1:
            problems.append(f"arity cap must be at least 1, got {self.arity_cap}")
        if self.cutoff < 1:
            problems.append(f"cutoff must be at least 1, got {self.cutoff}")
        if self.kmax < 2:
            problems.append(f"kmax must be at least 2, got {self.kmax}")
        if self.theory not in THEORIES:
            problems.append(f"unknown theory {self.theory}")
        if problems:
            for problem in problems:
                logger.error(problem)
            raise ValidationFailed("; ".join(problems))

    def degrees(self):
        """The window as a range; empty when lo > hi"""
        return range(self.window[0], self.window[1] + 1)

    def rng(self, *keys) -> random.Random:
        return rng(self.seed, *keys)

    def to_dict(self) -> Dict:
        values = asdict(self)
        values["window"] = f"{self.window[0]}..{self.window[1]}"
        return values

    @classmethod
    def from_dict(cls, values: Dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ParseError(f"unknown configuration keys: {', '.join(unknown)}", 1, 1)
        return cls(**values)

    @classmethod
    def from_yaml(cls, file_path: str) -> "RunConfig":
        with open(file_path, "r") as stream:
            try:
                values = yaml.safe_load(stream) or {}
            except yaml.YAMLError as e:
                mark = getattr(e, "problem_mark", None)
                logger.error(f"cannot parse {file_path}: {e}")
                if mark is not None:
                    raise ParseError(str(e), mark.line + 1, mark.column + 1)
                raise ParseError(str(e))
        logger.info(f"loaded run configuration from {file_path}")
        return cls.from_dict(values)

    def to_yaml(self, file_path: str):
        with open(file_path, "w", encoding="utf-8") as outfile:
            yaml.dump(self.to_dict(), outfile, default_flow_style=False)
        logger.info(f"run configuration serialized to {file_path}")


def rng(seed: int, *keys) -> random.Random:
    """A generator whose stream depends only on the seed and the keys.

    String seeds are hashed with SHA-512 by `random.Random`, so streams are
    identical across processes and platforms.
    """
    return random.Random(":".join([str(seed)] + [str(k) for k in keys]))
