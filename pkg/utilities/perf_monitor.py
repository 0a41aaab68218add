import time
from collections import OrderedDict
from typing import Dict

import numpy as np


class PerfSample:
    def __init__(self, perf_tracker, stage: str):
        self.perf_tracker = perf_tracker
        self.stage = stage
        self.start_time = None

    def __enter__(self):
        self.start_time = time.monotonic_ns()
        return self

    def __exit__(self, exception_type, exception_value, exception_traceback):
        duration = time.monotonic_ns() - self.start_time
        self.perf_tracker.samples.setdefault(self.stage, []).append(duration)


class PerfMonitor:
    """PerfMonitor tracks the duration of named pipeline stages.

    Example:
        tracker = PerfMonitor("solve")
        with tracker.sample("groebner"):
            // Do something

        print(tracker.summary_str())
    """

    def __init__(self, name):
        self.name = name
        self.samples: Dict[str, list] = OrderedDict()

    def sample(self, stage: str = "total") -> PerfSample:
        """Returns a context manager that records the duration of the block it wraps under ``stage``."""
        return PerfSample(self, stage)

    def totals(self) -> Dict[str, float]:
        """Total seconds per stage, in the order stages were first seen."""
        return {stage: float(np.sum(durations)) / 1e9 for stage, durations in self.samples.items()}

    def summary_str(self) -> str:
        """Returns a string summarizing the tracked stages."""
        if not self.samples:
            return f"{self.name} performance: N=0"

        parts = []
        for stage, durations in self.samples.items():
            durations_ns = np.array(durations)
            text = f"{stage}={self._format_duration(np.sum(durations_ns))}"
            if len(durations_ns) > 1:
                text += f" (N={len(durations_ns)}, Median={self._format_duration(np.median(durations_ns))})"
            parts.append(text)
        return f"{self.name} performance: " + " | ".join(parts)

    def _format_duration(self, duration_ns: int) -> str:
        units = [
            ("ns", 1),
            ("μs", 1000),
            ("ms", 1000_000),
            ("s", 1000_000_000),
            ("min", 60 * 1000_000_000),
        ]

        for unit, divisor in reversed(units):
            if duration_ns >= divisor:
                return f"{duration_ns/divisor:.2f} {unit}"

        return f"{duration_ns:.2f} ns"
