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

"""Exact finite probability primitives shared by every mechgame module.

Everything here is immutable after construction and built on
fractions.Fraction: there is no tolerance anywhere, two distributions
are equal only if every mass is identical.

TYPES

  Domain        ordered outcome labels of one variable.  The declared
                label order is the tie-breaking order used by solve and
                by every enumeration.
  Assignment    variable -> outcome index, hashable.
  Distribution  outcome -> exact mass, summing to exactly one.
  CPT           one row (a distribution over the child) per parent
                assignment, rows in lexicographic parent order.  A CPT is
                also the value of a mechanism variable.

OPTIONS

All library entry points accept an `opts` object and/or keyword
arguments overriding it.  The options are:

  cpt_guard = 4096   [integer > 0]

    largest number of deterministic CPTs enumerate_deterministic_cpts
    will produce for one variable.

  profile_guard = 10000000   [integer > 0]

    largest joint deterministic profile space solve will search.

  budget = 2000000   [integer > 0 or None]

    number of distinct oracle probes discovery may spend.  The
    environment variable MECHGAME_BUDGET overrides the default.  None
    disables the budget.

  collapse_objects = True   [boolean]

    probe mechanism targets with mechanism interventions only.  Object
    interventions never change the mechanism part of an oracle
    response, so this only drops redundant probes.

  pin_mechanisms = True   [boolean]

    probe object targets with every mechanism other than their own
    held at its first candidate.  With all mechanisms intervened no
    agent adapts, so an object only reads its own mechanism and its
    object parents.  Mechanism -> object edges other than M_V -> V are
    then never tested.

  memo_size = 100000   [integer > 0]

    number of respond results a ModelOracle keeps; the least recently
    used are dropped first.

  workers = 1   [integer > 0]

    threads used by discovery for each phase.

  progress_obj = None   [instance]

    a progress meter (see mechgame.progress) fed with probe counts.

  probe_callback = None   [callable or (callable, args, kwargs)]

    called with a CallbackObject (attributes target, query, count) for
    every fresh oracle probe.

  restricted_ok = False   [boolean]

    do not warn when a model restricts mechanism candidate sets.

  unreached_by_value = False   [boolean]

    at a context of probability zero every action is optimal and solve
    picks the first label.  When set, solve first keeps the actions
    that are best under do(Pa = context) and takes the first of those.
    best_response_in_context always returns the full set.

DEBUGGING

Set MECHGAME_DEBUG=level[,filename] to get a logger; see
_init_default_logger.
"""

import os
import sys
import itertools
from fractions import Fraction

from six import integer_types, string_types, text_type

########################################################################
#                     MODULE INITIALIZATION
########################################################################
try:
    from . import __version__
except ImportError:
    __version__ = '???'

########################################################################
# functions for debugging output.  These functions are here because they
# are also part of the module initialization.
DEBUG = None
def set_logger(DBOBJ):
    """Set the DEBUG object.  This is called by _init_default_logger when
    the environment variable MECHGAME_DEBUG is set, but can also be
    called by a calling program that wants mechgame output in its own
    logging tree.

    The passed-in object should be a logging.Logger instance.  The
    other mechgame modules look it up here at call time, so one call
    covers the whole package.
    """

    global DEBUG
    DEBUG = DBOBJ

def _init_default_logger(logspec=None):
    '''Build the 'mechgame' logger from logspec, or from MECHGAME_DEBUG
    when logspec is None:

      MECHGAME_DEBUG=level[,target]

    level is a logging level name (DEBUG, INFO, ...) or an integer;
    zero, negative or unreadable levels turn logging off.  target is a
    file name, '-' for stdout, or empty for stderr.

      MECHGAME_DEBUG=1,discovery.log   # everything, to discovery.log
      MECHGAME_DEBUG=WARNING,-         # warnings and worse, to stdout
      MECHGAME_DEBUG=INFO              # per-target progress, to stderr
    '''

    try:
        if logspec is None:
            logspec = os.environ['MECHGAME_DEBUG']
        level_name, _sep, target = logspec.partition(',')
        import logging
        level = logging.getLevelName(level_name)
        if not isinstance(level, integer_types): level = int(level_name)
        if level < 1: raise ValueError()

        if target == '-': handler = logging.StreamHandler(sys.stdout)
        elif target: handler = logging.FileHandler(target)
        else: handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter('%(asctime)s %(threadName)s %(message)s'))
        DBOBJ = logging.getLogger('mechgame')
        DBOBJ.propagate = False
        DBOBJ.addHandler(handler)
        DBOBJ.setLevel(level)
    except (KeyError, ImportError, ValueError):
        DBOBJ = None
    set_logger(DBOBJ)

# normally this would be from i18n or something like it ...
def _(st):
    return st

def _log_package_state():
    if not DEBUG: return
    DEBUG.debug('mechgame version    = %s' % __version__)
    DEBUG.debug('trans function "_"  = %s' % _)

_init_default_logger()
_log_package_state()

########################################################################
#                 END MODULE INITIALIZATION
########################################################################

########################################################################
#                 UTILITY FUNCTIONS
########################################################################

def exception2msg(e):
    try:
        return str(e)
    except UnicodeEncodeError:
        return text_type(e).encode('utf8')

def format_fraction(value):
    """'7/10' for Fraction(7, 10), '1' for integral values."""
    value = Fraction(value)
    if value.denominator == 1:
        return '%d' % value.numerator
    return '%d/%d' % (value.numerator, value.denominator)

MECHANISM_PREFIX = 'M_'

def mechanism_of(variable):
    """Node id of the mechanism variable governing `variable`."""
    return MECHANISM_PREFIX + variable

def is_mechanism(node):
    return node.startswith(MECHANISM_PREFIX)

def variable_of(node):
    """Inverse of mechanism_of; object node ids map to themselves."""
    if is_mechanism(node):
        return node[len(MECHANISM_PREFIX):]
    return node

########################################################################
#                 END UTILITY FUNCTIONS
########################################################################


class MechGameError(IOError):
    """
    MechGameError error codes:

      model errors (0 -- 255)
        0    - everything looks good (you should never see this)
        1    - malformed domain (empty, duplicate labels)
        2    - unknown variable or outcome label
        3    - distribution does not sum to one, or negative mass
        4    - malformed CPT (row count, row width, parents)
        5    - mismatched outcome spaces
        6    - size guard exceeded (.variable names the culprit if any)
        7    - cycle in the object-level graph
        8    - malformed game (kinds, agents, utility values)
        9    - incomplete policy profile
        10   - malformed model file (.location holds the document path)
        11   - illegal option value
        12   - malformed intervention

      algorithm errors (256 -- 511)
        256  - no equilibrium in the deterministic profile space
        257  - dependency rules do not reach a fixed point
        258  - discovered graph is not a mechanised SCM (.edges)
        259  - probe budget exhausted (.partial holds the edges found
               so far, a lower bound on the true edge set)
        260  - malformed graph handed to a graph algorithm

    To test which group a code is in, divide by 256: e.errno // 256.
    The command line tool exits with 1 for group 0 and 2 for group 1.

      try: solve(game)
      except MechGameError as e:
         if e.errno == 256: ...
         print(e)   # '[Errno 256] no equilibrium ...'
    """
    def __init__(self, *args):
        IOError.__init__(self, *args)
        self.location = None

class CallbackObject:
    """Container for callback data.

    mechgame stuffs whatever it wants to report into one of these, so
    every callback has the same prototype.  Functions taking a callback
    document the attributes they set.
    """
    def __init__(self, **kwargs):
        self.__dict__.update(kwargs)

def _run_callback(cb, obj):
    if not cb:
        return
    if callable(cb):
        return cb(obj)
    cb, arg, karg = cb
    return cb(obj, *arg, **karg)

def _default_budget():
    spec = os.environ.get('MECHGAME_BUDGET')
    if spec is None:
        return 2000000
    try:
        budget = int(spec)
        if budget < 1: raise ValueError()
    except ValueError:
        if DEBUG: DEBUG.warning('ignoring MECHGAME_BUDGET=%r', spec)
        return 2000000
    return budget


class MechGameOptions:
    """Keyword options with delegation: a derived instance answers
    from its own settings first, then from its parent."""

    def __init__(self, delegate=None, **kwargs):
        self.delegate = delegate
        if delegate is None:
            self._set_defaults()
        self._set_attributes(**kwargs)

    def __getattr__(self, name):
        if self.delegate and hasattr(self.delegate, name):
            return getattr(self.delegate, name)
        raise AttributeError(name)

    def derive(self, **kwargs):
        """Child options overriding only the given kwargs."""
        return MechGameOptions(delegate=self, **kwargs)

    def _set_attributes(self, **kwargs):
        self.__dict__.update(kwargs)
        for name in ('cpt_guard', 'profile_guard', 'workers',
                     'memo_size'):
            if name in kwargs:
                value = kwargs[name]
                if not isinstance(value, integer_types) or value < 1:
                    raise MechGameError(11, _('Illegal %s: %r')
                                        % (name, value))
        if 'budget' in kwargs and kwargs['budget'] is not None:
            if not isinstance(kwargs['budget'], integer_types) \
                   or kwargs['budget'] < 1:
                raise MechGameError(11, _('Illegal budget: %r')
                                    % (kwargs['budget'],))

    def _set_defaults(self):
        # every option documented above needs a default here
        self.cpt_guard = 4096
        self.profile_guard = 10 ** 7
        self.budget = _default_budget()
        self.collapse_objects = True
        self.pin_mechanisms = True
        self.workers = 1
        self.memo_size = 100000
        self.progress_obj = None
        self.probe_callback = None
        self.restricted_ok = False
        self.unreached_by_value = False

    def __repr__(self):
        return self.format()

    def format(self, indent='  '):
        keys = sorted(k for k in self.__dict__ if k != 'delegate')
        s = '{\n'
        for k in keys:
            s = s + indent + '%-15r: %r,\n' % (k, self.__dict__[k])
        if self.delegate:
            df = self.delegate.format(indent + '  ')
            s = s + indent + '%-15s: %s\n' % ("'delegate'", df)
        s = s + indent + '}'
        return s

default_options = MechGameOptions()

def _options(opts, kwargs):
    return (opts or default_options).derive(**kwargs)


########################################################################
#                 VALUE TYPES
########################################################################

ZERO = Fraction(0)
ONE = Fraction(1)

class Domain(object):
    """Finite, ordered set of outcome labels.

    Outcomes are referred to by index everywhere else; index order is
    declaration order.
    """
    __slots__ = ('labels', '_index')

    def __init__(self, labels):
        labels = tuple(text_type(l) for l in labels)
        if not labels:
            raise MechGameError(1, _('empty domain'))
        index = dict((l, i) for i, l in enumerate(labels))
        if len(index) != len(labels):
            raise MechGameError(1, _('duplicate outcome labels in %r')
                                % (labels,))
        self.labels = labels
        self._index = index

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(range(len(self.labels)))

    def index(self, label):
        try:
            return self._index[text_type(label)]
        except KeyError:
            raise MechGameError(2, _('unknown outcome %r, expected one of %s')
                                % (label, ', '.join(self.labels)))

    def label(self, index):
        return self.labels[index]

    def __eq__(self, other):
        return isinstance(other, Domain) and self.labels == other.labels

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return 'Domain(%s)' % ', '.join(self.labels)

def _size(domains, var):
    try:
        d = domains[var]
    except KeyError:
        raise MechGameError(2, _('unknown variable %r') % (var,))
    if isinstance(d, integer_types):
        return d
    return len(d)


class Assignment(object):
    """Hashable map from variable to outcome index.

    Bindings are stored sorted by variable so equality does not depend
    on construction order.
    """
    __slots__ = ('_items', '_map', '_hash')

    def __init__(self, bindings=()):
        if isinstance(bindings, Assignment):
            items = bindings._items
        else:
            if isinstance(bindings, dict):
                bindings = bindings.items()
            items = tuple(sorted(bindings))
        self._items = items
        self._map = dict(items)
        self._hash = hash(items)

    @classmethod
    def from_values(cls, variables, values):
        return cls(zip(variables, values))

    def __getitem__(self, var):
        return self._map[var]

    def get(self, var, default=None):
        return self._map.get(var, default)

    def __contains__(self, var):
        return var in self._map

    def __len__(self):
        return len(self._items)

    def __iter__(self):
        return (v for v, _i in self._items)

    def items(self):
        return self._items

    def variables(self):
        return tuple(v for v, _i in self._items)

    def values_for(self, variables):
        m = self._map
        return tuple(m[v] for v in variables)

    def project(self, variables):
        m = self._map
        return Assignment((v, m[v]) for v in variables if v in m)

    def merged(self, other):
        m = dict(self._items)
        m.update(Assignment(other)._items)
        return Assignment(m)

    def validate(self, domains):
        for var, i in self._items:
            size = _size(domains, var)
            if not (isinstance(i, integer_types) and 0 <= i < size):
                raise MechGameError(2, _('outcome index %r out of range for %s')
                                    % (i, var))
        return self

    def describe(self, domains=None):
        parts = []
        for var, i in self._items:
            if domains is not None and not isinstance(domains[var], integer_types):
                parts.append('%s=%s' % (var, domains[var].label(i)))
            else:
                parts.append('%s=%d' % (var, i))
        return ', '.join(parts)

    def __eq__(self, other):
        return isinstance(other, Assignment) and self._items == other._items

    def __ne__(self, other):
        return not self == other

    def __lt__(self, other):
        return self._items < other._items

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return 'Assignment(%s)' % self.describe()


class Distribution(object):
    """Exact distribution over hashable outcomes.

    `space` optionally names the outcome space (a tuple of indices for
    one variable, a tuple of variables for a joint); two distributions
    with different named spaces are not comparable.  Zero masses are
    dropped on construction.
    """
    __slots__ = ('mass', 'space')

    def __init__(self, mass, space=None):
        if isinstance(mass, dict):
            mass = mass.items()
        clean = {}
        total = ZERO
        for key, m in mass:
            m = Fraction(m)
            if m < 0:
                raise MechGameError(3, _('negative mass %s at %r')
                                    % (format_fraction(m), key))
            if m:
                clean[key] = clean.get(key, ZERO) + m
                total += m
        if total != ONE:
            raise MechGameError(3, _('distribution sums to %s, not 1')
                                % format_fraction(total))
        self.mass = clean
        self.space = space

    def __getitem__(self, outcome):
        return self.mass.get(outcome, ZERO)

    def items(self):
        return self.mass.items()

    def support(self):
        return sorted(self.mass)

    def is_point_mass(self):
        return len(self.mass) == 1

    def outcome(self):
        """The single outcome of a point mass."""
        if len(self.mass) != 1:
            raise MechGameError(3, _('distribution is not a point mass'))
        return next(iter(self.mass))

    def __eq__(self, other):
        return isinstance(other, Distribution) and distributions_equal(self, other)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(frozenset(self.mass.items()))

    def __repr__(self):
        body = ', '.join('%r: %s' % (k, format_fraction(m))
                         for k, m in sorted(self.mass.items(), key=repr))
        return 'Distribution({%s})' % body


class CPT(object):
    """Exact conditional probability table.

    rows[i] is the distribution of `child` (a tuple of Fractions, one
    per outcome index) at the i-th parent assignment, parent
    assignments enumerated lexicographically with the first parent
    most significant.
    """
    __slots__ = ('child', 'parents', 'parent_sizes', 'size', 'rows',
                 '_strides', '_hash')

    def __init__(self, child, parents, rows, domains):
        parents = tuple(parents)
        if child in parents:
            raise MechGameError(4, _('%s listed as its own parent') % child)
        parent_sizes = tuple(_size(domains, p) for p in parents)
        size = _size(domains, child)
        nrows = 1
        for s in parent_sizes:
            nrows *= s
        rows = tuple(rows)
        if len(rows) != nrows:
            raise MechGameError(4, _('CPT of %s has %d rows, expected %d')
                                % (child, len(rows), nrows))
        checked = []
        for i, row in enumerate(rows):
            row = tuple(Fraction(m) for m in row)
            if len(row) != size:
                raise MechGameError(4, _('row %d of %s has %d entries, '
                                         'expected %d')
                                    % (i, child, len(row), size))
            if min(row) < 0 or sum(row) != ONE:
                err = MechGameError(3, _('row %d of %s sums to %s, not 1')
                                    % (i, child, format_fraction(sum(row))))
                err.row = i
                raise err
            checked.append(row)
        strides = []
        acc = 1
        for s in reversed(parent_sizes):
            strides.append(acc)
            acc *= s
        self.child = child
        self.parents = parents
        self.parent_sizes = parent_sizes
        self.size = size
        self.rows = tuple(checked)
        self._strides = tuple(reversed(strides))
        self._hash = hash((child, parents, parent_sizes, self.rows))

    @classmethod
    def point(cls, child, parents, actions, domains):
        """Deterministic CPT: row i puts all mass on outcome actions[i]."""
        size = _size(domains, child)
        rows = []
        for a in actions:
            row = [ZERO] * size
            row[a] = ONE
            rows.append(row)
        return cls(child, parents, rows, domains)

    @classmethod
    def constant(cls, child, index, domains, parents=()):
        nrows = 1
        for p in parents:
            nrows *= _size(domains, p)
        return cls.point(child, parents, (index,) * nrows, domains)

    def row_index(self, values):
        """Row index of the parent outcome tuple `values`."""
        i = 0
        for v, s in zip(values, self._strides):
            i += v * s
        return i

    def row_for(self, values):
        return self.rows[self.row_index(values)]

    def row(self, assignment):
        values = Assignment(assignment).values_for(self.parents)
        return Distribution(enumerate(self.row_for(values)),
                            space=tuple(range(self.size)))

    def parent_assignments(self):
        return [Assignment.from_values(self.parents, values) for values in
                itertools.product(*[range(s) for s in self.parent_sizes])]

    def items(self):
        return zip(self.parent_assignments(), self.rows)

    @property
    def is_deterministic(self):
        return all(max(row) == ONE for row in self.rows)

    @property
    def is_constant(self):
        return all(row == self.rows[0] for row in self.rows)

    def actions(self):
        """Outcome per row of a deterministic CPT."""
        if not self.is_deterministic:
            raise MechGameError(4, _('CPT of %s is not deterministic')
                                % self.child)
        return tuple(row.index(ONE) for row in self.rows)

    def describe(self, domains=None):
        def lab(i):
            if domains is None: return '%d' % i
            return domains[self.child].label(i)
        if self.is_deterministic:
            acts = self.actions()
            if self.is_constant:
                return '%s := %s' % (self.child, lab(acts[0]))
            cases = ['%s -> %s' % (pa.describe(domains), lab(a))
                     for pa, a in zip(self.parent_assignments(), acts)]
            return '%s := {%s}' % (self.child, '; '.join(cases))
        rows = ' | '.join(' '.join(format_fraction(m) for m in row)
                          for row in self.rows)
        return '%s ~ [%s]' % (self.child, rows)

    def _key(self):
        return (self.child, self.parents, self.parent_sizes, self.rows)

    def __eq__(self, other):
        return isinstance(other, CPT) and self._hash == other._hash \
               and self._key() == other._key()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return '<CPT %s>' % self.describe()


########################################################################
#                 OPERATIONS
########################################################################

def enumerate_assignments(variables, domains):
    """All joint assignments of `variables`, lexicographic in variable
    order then outcome index.  An empty list yields one empty
    assignment."""
    variables = list(variables)
    sizes = [_size(domains, v) for v in variables]
    return [Assignment.from_values(variables, values)
            for values in itertools.product(*[range(s) for s in sizes])]

def distributions_equal(d1, d2):
    """Exact equality of two distributions over the same space."""
    if d1.space is not None and d2.space is not None \
           and d1.space != d2.space:
        raise MechGameError(5, _('cannot compare distributions over %r '
                                 'and %r') % (d1.space, d2.space))
    return d1.mass == d2.mass

def enumerate_deterministic_cpts(child, parents, domains, opts=None, **kwargs):
    """Every deterministic CPT for `child`, lexicographic over row
    choices (first row most significant).  This order is the
    preference order over decision rules."""
    opts = _options(opts, kwargs)
    size = _size(domains, child)
    nrows = 1
    for p in parents:
        nrows *= _size(domains, p)
    count = size ** nrows
    if count > opts.cpt_guard:
        err = MechGameError(6, _('%s has %d deterministic CPTs, more than '
                                 'the guard of %d')
                            % (child, count, opts.cpt_guard))
        err.variable = child
        raise err
    return [CPT.point(child, parents, actions, domains)
            for actions in itertools.product(range(size), repeat=nrows)]

def constant_cpts(child, parents, domains):
    """One constant deterministic CPT per outcome of `child`."""
    return [CPT.constant(child, i, domains, parents)
            for i in range(_size(domains, child))]

def parse_fraction(value):
    """Exact rational from an int, Fraction, 'p/q' or decimal string.

    Decimal strings convert exactly: '0.75' -> 3/4.  Floats are
    rejected; their binary expansion is not what the author wrote.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise MechGameError(3, _('inexact number %r, write it as a string')
                            % (value,))
    if isinstance(value, (Fraction,) + integer_types):
        return Fraction(value)
    if isinstance(value, string_types):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise MechGameError(3, _('not an exact number: %r') % (value,))
