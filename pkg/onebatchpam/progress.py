# -*- encoding: utf-8 -*-
"""A status line printer reporting the progress of a benchmark run.
"""


import sys
import shutil
import traceback


class LinePrinter(object):
    """Overwrite the previous status line on a terminal.

    On a terminal a new status overwrites the previous one with a carriage
    return and pads with spaces what a longer previous line left behind. When
    the output is not a terminal (a file, a pipe) each status gets its own
    line. Nothing is written in quiet mode. Messages must not contain "\\r" or
    "\\n"; use the provided methods instead.
    """

    def __init__(self, output=None, isatty=None, quiet=False):
        if output is None:
            output = sys.stderr
        self._output = output
        if isatty is None:
            isatty = hasattr(output, "isatty") and output.isatty()
        self._isatty = isatty
        self._quiet = quiet
        self.reset()

    def reset(self):
        self._prev_line = None
        self._last_is_nl = True

    def write(self, string):
        if not isinstance(string, str):
            raise TypeError("string must be str, not {}"
                            .format(type(string).__name__))
        if self._quiet:
            return
        self._last_is_nl = string.endswith("\n")
        self._output.write(string)

    def write_nl(self, line, auto=True):
        self.write(line)
        self.new_line(auto=auto)

    def new_line(self, auto=True):
        if not auto or not self._last_is_nl:
            self.write("\n")
        self.reset()

    def _termwidth(self):
        return shutil.get_terminal_size(fallback=(0, 0)).columns

    def overwrite(self, line):
        if not isinstance(line, str):
            raise TypeError("line must be str, not {}"
                            .format(type(line).__name__))
        # Do nothing if the line has not changed.
        if self._prev_line is not None and self._prev_line == line:
            return
        if not self._isatty:
            self.write(line)
            self.write("\n")
        else:
            termwidth = self._termwidth()
            if termwidth:
                line = line[:max(0, termwidth - 1)]
            self.write("\r")
            self.write(line)
            if self._prev_line is not None \
               and len(line) < len(self._prev_line):
                self.write(" " * (len(self._prev_line) - len(line)))
        self._prev_line = line
        if not self._quiet:
            self._output.flush()

    def write_exception(self):
        self.new_line()
        for line in traceback.format_exc().splitlines():
            self.write_nl(line)

    @property
    def prev_line(self):
        return self._prev_line

    @property
    def isatty(self):
        return self._isatty

    @property
    def quiet(self):
        return self._quiet
