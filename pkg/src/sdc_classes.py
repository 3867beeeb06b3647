#!/usr/bin/env python3
"""
Value classes shared by the protocol, bound and CLI modules
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

from src.linalg_core import SEED_LIMIT
from src.sdc_errors import ArgumentError

COMMANDS = ("exact", "randomized", "share", "tail", "flat-fraction", "bounds", "resources")
STATE_KINDS = ("mes", "product", "haar")
OUTPUT_FORMATS = ("json", "csv", "pretty")


@dataclass(frozen=True)
class ResourceTally:
    """Resources consumed by one protocol run (qubits are log2 of dimensions)"""
    qubits_sent: float = 0.0
    ebits_consumed: float = 0.0
    shared_random_bits: float = 0.0

    def __post_init__(self):
        for name in ("qubits_sent", "ebits_consumed", "shared_random_bits"):
            if getattr(self, name) < 0:
                raise ArgumentError(f"{name} must be >= 0, got {getattr(self, name)}")

    def to_json_dict(self) -> Dict[str, float]:
        return asdict(self)

    def __str__(self):
        return (f"{self.qubits_sent:.4g} qubits + {self.ebits_consumed:.4g} ebits"
                f" + {self.shared_random_bits:.4g} shared bits")


@dataclass(frozen=True)
class BoundParams:
    """d_A, d_B and epsilon of the concentration bounds"""
    d_a: int
    d_b: int
    epsilon: float

    def __post_init__(self):
        if not (0.0 < self.epsilon <= 1.0) or math.isnan(self.epsilon):
            raise ArgumentError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        # d_A = 0 is allowed as the degenerate limit of the Gaussian tail
        if self.d_a < 0 or self.d_b < 1:
            raise ArgumentError(f"need d_A >= 0 and d_B >= 1, got d_A={self.d_a}, d_B={self.d_b}")

    def to_json_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_json_dict(cls, data: Dict[str, Any]) -> "BoundParams":
        return cls(d_a=int(data["d_a"]), d_b=int(data["d_b"]), epsilon=float(data["epsilon"]))


@dataclass(frozen=True)
class ResourceProfile:
    """Closed-form resource counts for communicating a 2l-qubit state"""
    l: int
    epsilon: float
    qubits: float
    ebits: float
    shared_random_bits: float
    rate: float
    qubits_exact: float = 0.0
    exact_log2_ensemble_size: float = 0.0
    approximation_note: str = ""

    def __post_init__(self):
        if min(self.qubits, self.ebits, self.shared_random_bits) < 0 or self.rate <= 0:
            raise ArgumentError("resource counts must be non-negative and the rate positive")

    def to_json_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ExperimentConfig:
    """Everything needed to re-run one CLI experiment"""
    command: str
    d: int = 2
    d_a: int = 16
    d_a1: int = 2
    epsilon: float = 0.5
    trials: int = 2000
    ensemble_size: int = 64
    seed: int = 0
    seed_source: str = "default"
    state_spec: str = "product"
    output: str = "pretty"
    l: int = 10
    workers: int = 1
    save: bool = False
    results_dir: str = "results"

    def validate(self) -> "ExperimentConfig":
        """Check documented ranges; raises ArgumentError naming the field."""
        if self.command not in COMMANDS:
            raise ArgumentError(f"command must be one of {COMMANDS}, got {self.command!r}")
        if self.output not in OUTPUT_FORMATS:
            raise ArgumentError(f"output must be one of {OUTPUT_FORMATS}, got {self.output!r}")
        if not (self.state_spec in STATE_KINDS or self.state_spec.startswith("file:")):
            raise ArgumentError(f"state must be mes, product, haar or file:<path>, got {self.state_spec!r}")
        # bounds and resources are closed forms; only simulations need small d
        simulated = self.command not in ("bounds", "resources")
        checks = [
            ("d", 1 <= self.d <= 64 if simulated else self.d >= 1,
             "1 <= d <= 64" if simulated else "d >= 1"),
            ("d_a", self.d_a >= 1, "d_a >= 1"),
            ("d_a1", self.d_a1 >= 1, "d_a1 >= 1"),
            ("epsilon", 0.0 < self.epsilon <= 1.0, "0 < epsilon <= 1"),
            ("trials", self.trials >= (100 if self.command == "tail" else 1),
             "trials >= 100" if self.command == "tail" else "trials >= 1"),
            ("ensemble_size", self.ensemble_size >= 1, "ensemble_size >= 1"),
            ("l", self.l >= 1, "l >= 1"),
            ("workers", 1 <= self.workers <= 32, "1 <= workers <= 32"),
            ("seed", 0 <= self.seed < SEED_LIMIT, "0 <= seed < 2^64"),
        ]
        for name, ok, rule in checks:
            if not ok:
                flag = "--" + name.replace("_", "-")
                raise ArgumentError(f"{flag}={getattr(self, name)} violates {rule}")
        return self

    def to_json_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        # where the report lands is not part of the experiment
        data.pop("save")
        data.pop("results_dir")
        data.pop("workers")
        return data


@dataclass
class ExperimentReport:
    """Result of one CLI run: config echo, aggregate results, CSV rows"""
    command: str
    config: Dict[str, Any]
    results: Dict[str, Any]
    columns: List[str] = field(default_factory=list)
    rows: List[Dict[str, Any]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def seed(self) -> Optional[int]:
        return self.config.get("seed")

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "rows": self.rows,
            "notes": self.notes,
        }
