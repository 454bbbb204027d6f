# -*- encoding: utf-8 -*-
"""Provide a traditional stopwatch.

The clock is monotonic (time.perf_counter) since readings are compared across
algorithms; readings are in milliseconds.
"""


import time


class StopWatch(object):

    def __init__(self, clock=time.perf_counter):
        self._clock = clock
        self.reset()

    def reset(self):
        self._started_at = None

    def start(self):
        if self.is_started:
            raise RuntimeError("stopwatch already started")
        self._started_at = self._clock()
        return self

    @property
    def is_started(self):
        return self._started_at is not None

    @property
    def total_millis(self):
        if self.is_started:
            return (self._clock() - self._started_at) * 1e3
        else:
            return 0.0

def format_millis(millis):
    """A short human readable version of a duration given in milliseconds."""
    if millis < 1e3:
        return "{:.1f}ms".format(millis)
    seconds = millis / 1e3
    if seconds < 60:
        return "{:.2f}s".format(seconds)
    minutes, seconds = divmod(int(round(seconds)), 60)
    if minutes < 60:
        return "{:d}m {:d}s".format(minutes, seconds)
    hours, minutes = divmod(minutes, 60)
    return "{:d}h {:d}m".format(hours, minutes)
