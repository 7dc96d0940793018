#   This library is free software; you can redistribute it and/or
#   modify it under the terms of the GNU Lesser General Public
#   License as published by the Free Software Foundation; either
#   version 2.1 of the License, or (at your option) any later version.
#
#   This library is distributed in the hope that it will be useful,
#   but WITHOUT ANY WARRANTY; without even the implied warranty of
#   MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
#   Lesser General Public License for more details.
#
#   You should have received a copy of the GNU Lesser General Public
#   License along with this library; if not, write to the
#      Free Software Foundation, Inc.,
#      59 Temple Place, Suite 330,
#      Boston, MA  02111-1307  USA

# This file is part of mechgame, exact mechanised causal games and
# agent discovery from interventions.

"""Probe-count progress meters for long discovery runs.

A meter follows the start/update/end protocol: discovery calls
start(text=..., size=budget), then update(count) after every fresh
oracle probe and end(count) when a phase is done.  Updates closer
together than update_period seconds are dropped; end() always draws.
"""

import sys
import time
import shutil

from six.moves import _thread as thread

COUNT_SUFFIXES = ('', 'k', 'M', 'G', 'T')


def format_count(n):
    """Probe counts and rates as short metric numbers: 950, 1.2k, 740k, 2.0M"""
    i = 0
    while n >= 1000 and i < len(COUNT_SUFFIXES) - 1:
        n = n / 1000.0
        i += 1
    if i == 0:
        return '%d' % n
    if n < 9.95:
        return '%.1f%s' % (n, COUNT_SUFFIXES[i])
    return '%.0f%s' % (n, COUNT_SUFFIXES[i])

def format_elapsed(seconds):
    """mm:ss, or h:mm:ss past the hour; '--:--' when unknown."""
    if seconds is None or seconds < 0:
        return '--:--'
    minutes, seconds = divmod(int(seconds), 60)
    hours, minutes = divmod(minutes, 60)
    if hours:
        return '%d:%02d:%02d' % (hours, minutes, seconds)
    return '%02d:%02d' % (minutes, seconds)


class ProbeRate:
    """Probes per second, smoothed so that samples older than `window`
    seconds no longer count."""

    def __init__(self, window=5.0):
        self.window = window
        self.reset()

    def reset(self, budget=None, now=None):
        if now is None: now = time.time()
        self.budget = budget
        self.started = now
        self.seen = now
        self.count = 0
        self.rate = None

    def sample(self, count, now):
        if count <= self.count:
            # counters restart with every discovery phase
            self.count = count
            self.seen = now
            self.rate = None
            return
        dt = now - self.seen
        if dt > 0:
            fresh = (count - self.count) / dt
            if self.rate is None:
                self.rate = fresh
            else:
                w = min(1.0, dt / self.window)
                self.rate = w * fresh + (1 - w) * self.rate
        self.count = count
        self.seen = now

    @property
    def elapsed(self):
        return self.seen - self.started

    @property
    def spent(self):
        """Fraction of the budget used; None without a budget."""
        if not self.budget:
            return None
        return min(1.0, float(self.count) / self.budget)


class BaseMeter:
    """Rate limiting and bookkeeping; subclasses draw in _do_start,
    _do_update and _do_end."""

    def __init__(self):
        self.update_period = 0.3
        self.text = None
        self.size = None
        self.rate = ProbeRate()
        self._last_draw = None
        # discovery workers share one meter
        self._lock = thread.allocate_lock()

    def start(self, text=None, size=None, now=None):
        if now is None: now = time.time()
        self.text = text
        self.size = size
        self.rate.reset(size, now)
        self._last_draw = now
        self._do_start(now)

    def update(self, count, now=None):
        if now is None: now = time.time()
        self._lock.acquire()
        try:
            if self._last_draw is not None and \
               now < self._last_draw + self.update_period:
                return
            self._last_draw = now
            self.rate.sample(count, now)
            self._do_update(count, now)
        finally:
            self._lock.release()

    def end(self, count, now=None):
        if now is None: now = time.time()
        self.rate.sample(count, now)
        self._do_end(count, now)

    def _do_start(self, now):
        pass

    def _do_update(self, count, now):
        pass

    def _do_end(self, count, now):
        pass


class TextMeter(BaseMeter):
    """One carriage-return status line on `fo`:

      discover          12% [=         ]  3.1k probes/s | 240k probes  00:17
    """

    def __init__(self, fo=sys.stderr):
        BaseMeter.__init__(self)
        self.fo = fo

    def _line(self, count):
        spent = self.rate.spent
        if spent is None:
            gauge = ''
        else:
            gauge = ' %3d%% [%-10s]' % (spent * 100, '=' * int(10 * spent))
        tail = '%s %5s probes/s | %5s probes  %s' % (
            gauge, format_count(self.rate.rate or 0), format_count(count),
            format_elapsed(self.rate.elapsed))
        width = max(8, shutil.get_terminal_size().columns - len(tail) - 1)
        return '\r%-*.*s%s' % (width, width, self.text or '', tail)

    def _do_update(self, count, now):
        self.fo.write(self._line(count) + '\r')
        self.fo.flush()

    def _do_end(self, count, now):
        self.fo.write(self._line(count) + '\n')
        self.fo.flush()
