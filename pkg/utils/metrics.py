"""Monte Carlo tallies for the spin-wave memory simulator."""
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional


@dataclass
class StageTally:
    """
    Success counts of one protocol stage.

    Attributes:
        name: Stage name
        attempts: Number of attempts
        successes: Number of successful attempts
        expected: Analytic success probability to compare against, if known
    """
    name: str
    attempts: int = 0
    successes: int = 0
    expected: Optional[float] = None

    @property
    def probability(self) -> float:
        return self.successes / self.attempts if self.attempts > 0 else float('nan')

    @property
    def sigma(self) -> float:
        """Binomial standard error of the estimated probability."""
        if self.attempts == 0:
            return float('nan')
        p = self.probability
        return math.sqrt(p * (1 - p) / self.attempts)

    def deviation(self) -> Optional[float]:
        """Distance from the expected value in units of the expected binomial error."""
        if self.expected is None or self.attempts == 0:
            return None
        spread = math.sqrt(self.expected * (1 - self.expected) / self.attempts)
        if spread == 0:
            return 0.0 if self.probability == self.expected else math.inf
        return abs(self.probability - self.expected) / spread

    def record(self, attempts: int, successes: int):
        self.attempts += int(attempts)
        self.successes += int(successes)

    def to_dict(self) -> Dict[str, object]:
        return {
            'attempts': self.attempts,
            'successes': self.successes,
            'probability': self.probability,
            'sigma': self.sigma,
            'expected': self.expected,
        }


class MonteCarloTally:
    """
    Collects per-stage counts of a Monte Carlo run.

    Tallies from independent blocks are combined with merge(); since only counts are
    added, the result does not depend on how the trials were split.
    """

    def __init__(self, stages: Iterable[str]):
        """Initialize empty tallies for the named stages."""
        self.stages: Dict[str, StageTally] = {name: StageTally(name) for name in stages}
        self.trials = 0
        self.extras: Dict[str, float] = {}

    def __getitem__(self, name: str) -> StageTally:
        return self.stages[name]

    def record(self, name: str, attempts: int, successes: int):
        self.stages[name].record(attempts, successes)

    def merge(self, other: 'MonteCarloTally') -> 'MonteCarloTally':
        """
        Add the counts of another tally into this one.

        Args:
            other: Tally over the same stages

        Returns:
            self
        """
        if set(other.stages) != set(self.stages):
            raise ValueError(f"cannot merge tallies over {sorted(other.stages)} into {sorted(self.stages)}")
        for name, tally in other.stages.items():
            self.stages[name].record(tally.attempts, tally.successes)
        self.trials += other.trials
        return self

    def set_expected(self, name: str, value: float):
        self.stages[name].expected = value

    def names(self) -> List[str]:
        return list(self.stages)

    def to_dict(self) -> Dict[str, object]:
        return {
            'trials': self.trials,
            'stages': {name: t.to_dict() for name, t in self.stages.items()},
            **self.extras,
        }

    def report(self) -> str:
        """
        Generate a text report of the collected counts.

        Returns:
            String containing the report
        """
        report = "=== Monte Carlo Report ===\n"
        report += f"Trials: {self.trials}\n"
        for name, t in self.stages.items():
            report += f"{name}: {t.successes}/{t.attempts} = {t.probability:.5f} +/- {t.sigma:.5f}"
            if t.expected is not None:
                report += f" (expected {t.expected:.5f}, {t.deviation():.2f} sigma)"
            report += "\n"
        for key, value in self.extras.items():
            report += f"{key}: {value:.6g}\n"
        return report
