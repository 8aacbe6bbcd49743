"""Simple statistics."""

import math

SCALE = 10


class Summary:
    """Running summary of a sample."""

    def __init__(self, values):
        self.values = values
        self.total = sum(values)

    def mean(self):
        return self.total / len(self.values)

    def spread(self, center=None):
        mid = center if center is not None else self.mean()
        return math.sqrt(sum((v - mid) ** 2 for v in self.values))


def describe(values):
    summary = Summary(values)
    return summary.mean(), summary.spread()
