"""Named pass/fail results shared by the verification suites"""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CheckResult:
    check: str
    points: int
    max_defect: float
    tolerance: float
    passed: bool

    @classmethod
    def from_defects(cls, check, defects, tolerance):
        """Aggregate per-point defects by max; a non-finite defect fails the check."""
        defects = np.atleast_1d(np.asarray(defects, dtype=float))
        worst = float(np.max(defects)) if defects.size else 0.0
        passed = bool(np.isfinite(worst) and worst <= tolerance)
        return cls(check, int(defects.size), worst, float(tolerance), passed)

    def to_dict(self):
        return {
            'check': self.check,
            'points': self.points,
            'max_defect': self.max_defect,
            'tolerance': self.tolerance,
            'pass': self.passed,
        }


def all_passed(results):
    return all(result.passed for result in results)
