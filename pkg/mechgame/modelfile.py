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

"""Model files.

A model file is a UTF-8 JSON document describing a causal game and,
optionally, its mechanisms:

  {
    "format_version": 1,
    "metadata": {"name": "mouse", "description": "..."},
    "agents": ["agent1"],                          (optional)
    "variables": [
      {"name": "D", "domain": ["0", "1"], "kind": "decision",
       "agent": "agent1"},
      {"name": "X", "domain": ["0", "1"], "parents": ["D"],
       "kind": "chance", "cpt": [["3/4", "1/4"], ["1/4", "3/4"]]},
      {"name": "U", "domain": ["0", "1"], "parents": ["X"],
       "kind": "utility", "agent": "agent1",
       "cpt": [...], "utility": {"0": 0, "1": 1}}
    ],
    "mechanisms": {                                (optional)
      "candidates": {"X": [<cpt rows>, ...]},
      "dependencies": {"U": [{"when": {"H2": <cpt rows>},
                              "then": <cpt rows>}]},
      "structural": {"X": [<one row>, ...]}
    }
  }

CPT rows follow the parent order given in "parents", first parent
most significant.  Numbers are exact: integers, "p/q" strings or
decimals ("0.75" and 0.75 both read as 3/4).  A utility owned by
several agents lists them under "agents".

Every problem, structural or semantic, raises MechGameError 10 with
.location set to the dotted document path (variables.2.cpt.1).
"""

import os
import json
from fractions import Fraction
from typing import Annotated, Dict, List, Literal, Optional

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field
from pydantic import ValidationError

from .core import MechGameError, CPT, Domain, _, exception2msg
from .core import format_fraction, is_mechanism, parse_fraction
from .game import DECISION, UTILITY, CausalGame
from .oracle import DependencyRule, MechanisedCausalGame
from .scm import ObjectGraph

FORMAT_VERSION = 1


def _exact(value):
    try:
        return parse_fraction(value)
    except MechGameError as e:
        raise ValueError(e.strerror)

Rational = Annotated[Fraction, BeforeValidator(_exact)]
Rows = List[List[Rational]]


class _Schema(BaseModel):
    model_config = ConfigDict(extra='forbid', frozen=True,
                              arbitrary_types_allowed=True)


class Metadata(_Schema):
    name: Optional[str] = None
    source: Optional[str] = None
    description: Optional[str] = None


class VariableSpec(_Schema):
    name: str = Field(min_length=1)
    domain: List[str] = Field(min_length=1)
    parents: List[str] = Field(default_factory=list)
    kind: Literal['chance', 'decision', 'utility'] = 'chance'
    agent: Optional[str] = None
    agents: Optional[List[str]] = None
    cpt: Optional[Rows] = None
    utility: Optional[Dict[str, Rational]] = None

    def owners(self):
        if self.agents is not None:
            return list(self.agents)
        if self.agent is not None:
            return [self.agent]
        return []


class DependencyCase(_Schema):
    when: Dict[str, Rows]
    then: Rows


class MechanismSpec(_Schema):
    candidates: Dict[str, List[Rows]] = Field(default_factory=dict)
    dependencies: Dict[str, List[DependencyCase]] = Field(default_factory=dict)
    structural: Dict[str, List[List[Rational]]] = Field(default_factory=dict)


class ModelDocument(_Schema):
    format_version: Literal[1] = FORMAT_VERSION
    metadata: Metadata = Field(default_factory=Metadata)
    agents: Optional[List[str]] = None
    variables: List[VariableSpec]
    mechanisms: MechanismSpec = Field(default_factory=MechanismSpec)


def _location(loc):
    return '.'.join('%s' % p for p in loc)

def _model_error(location, msg):
    err = MechGameError(10, '%s: %s' % (location or '<document>', msg))
    err.location = location
    return err

class _At:
    """Re-raise any MechGameError inside the block as a positioned
    model-file error."""

    def __init__(self, *loc):
        self.location = _location(loc)

    def __enter__(self):
        return self

    def __exit__(self, etype, value, tb):
        if etype is None or not issubclass(etype, MechGameError):
            return False
        if value.errno == 10:
            return False
        err = _model_error(self.location, value.strerror)
        err.reason = value.errno
        raise err


def _load_document(text):
    if isinstance(text, bytes):
        try:
            text = text.decode('utf-8')
        except UnicodeDecodeError as e:
            raise _model_error('', _('not UTF-8 text: %s') % e)
    try:
        raw = json.loads(text, parse_float=str)
    except ValueError as e:
        loc = 'line %d column %d' % (getattr(e, 'lineno', 0),
                                     getattr(e, 'colno', 0))
        raise _model_error(loc, _('invalid JSON: %s')
                           % getattr(e, 'msg', exception2msg(e)))
    try:
        return ModelDocument.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        raise _model_error(_location(first['loc']), first['msg'])

def _cpt(name, parents, rows, domains, *loc):
    with _At(*loc):
        return CPT(name, parents, rows, domains)

def _build_game(doc):
    domains = {}
    parents = {}
    kind = {}
    owners = {}
    index = {}
    declared_agents = doc.agents
    for i, spec in enumerate(doc.variables):
        if spec.name in index:
            raise _model_error('variables.%d.name' % i,
                               _('duplicate variable %s') % spec.name)
        if is_mechanism(spec.name):
            raise _model_error('variables.%d.name' % i,
                               _('%s: names starting with M_ are reserved '
                                 'for mechanisms') % spec.name)
        index[spec.name] = i
        with _At('variables', i, 'domain'):
            domains[spec.name] = Domain(spec.domain)
        parents[spec.name] = tuple(spec.parents)
        kind[spec.name] = spec.kind
        agents = spec.owners()
        if agents:
            owners[spec.name] = agents
        if declared_agents is not None:
            for a in agents:
                if a not in declared_agents:
                    raise _model_error('variables.%d.agent' % i,
                                       _('unknown agent %s') % a)

    for name, i in sorted(index.items()):
        for j, p in enumerate(parents[name]):
            if p not in index:
                raise _model_error('variables.%d.parents.%d' % (i, j),
                                   _('unknown parent %s') % p)
    with _At('variables'):
        graph = ObjectGraph(index, domains, parents)

    cpts = {}
    values = {}
    for name, i in sorted(index.items()):
        spec = doc.variables[i]
        if spec.kind == DECISION:
            if spec.cpt is not None:
                raise _model_error('variables.%d.cpt' % i,
                                   _('decision %s cannot have a CPT') % name)
            if len(spec.owners()) != 1:
                raise _model_error('variables.%d.agent' % i,
                                   _('decision %s needs exactly one agent')
                                   % name)
            continue
        if spec.cpt is None:
            raise _model_error('variables.%d' % i, _('%s needs a cpt') % name)
        cpts[name] = _cpt(name, parents[name], spec.cpt, domains,
                          'variables', i, 'cpt')
        if spec.kind == UTILITY:
            if spec.utility is None:
                raise _model_error('variables.%d' % i,
                                   _('utility %s needs utility values') % name)
            table = []
            for label in spec.domain:
                if label not in spec.utility:
                    raise _model_error('variables.%d.utility' % i,
                                       _('no value for outcome %s') % label)
                table.append(spec.utility[label])
            extra = sorted(set(spec.utility) - set(spec.domain))
            if extra:
                raise _model_error('variables.%d.utility.%s' % (i, extra[0]),
                                   _('unknown outcome %s') % extra[0])
            values[name] = tuple(table)
        elif spec.utility is not None:
            raise _model_error('variables.%d.utility' % i,
                               _('only utility variables carry values'))

    agents = set(declared_agents or ())
    for a in owners.values():
        agents.update(a)
    with _At('variables'):
        return CausalGame(agents, graph, kind, owners, cpts, values)

def _build_mechanisms(doc, game):
    graph = game.graph
    domains = game.domains
    mech = doc.mechanisms

    def known(section, v):
        if v not in graph.parents:
            raise _model_error('mechanisms.%s.%s' % (section, v),
                               _('unknown variable %s') % v)
        return graph.parents[v]

    candidates = {}
    for v, lists in sorted(mech.candidates.items()):
        pa = known('candidates', v)
        candidates[v] = [_cpt(v, pa, rows, domains,
                              'mechanisms', 'candidates', v, k)
                         for k, rows in enumerate(lists)]
    structural = {}
    for v, lists in sorted(mech.structural.items()):
        pa = known('structural', v)
        nrows = len(CPT.constant(v, 0, domains, pa).rows)
        structural[v] = [_cpt(v, pa, [row] * nrows, domains,
                              'mechanisms', 'structural', v, k)
                         for k, row in enumerate(lists)]
    dependencies = {}
    for v, cases in sorted(mech.dependencies.items()):
        pa = known('dependencies', v)
        built = []
        for k, case in enumerate(cases):
            when = {}
            for w, rows in sorted(case.when.items()):
                if w not in graph.parents:
                    raise _model_error('mechanisms.dependencies.%s.%d.when.%s'
                                       % (v, k, w), _('unknown variable %s') % w)
                when[w] = _cpt(w, graph.parents[w], rows, domains,
                               'mechanisms', 'dependencies', v, k, 'when', w)
            then = _cpt(v, pa, case.then, domains,
                        'mechanisms', 'dependencies', v, k, 'then')
            built.append((when, then))
        with _At('mechanisms', 'dependencies', v):
            dependencies[v] = DependencyRule(v, built)
    metadata = dict((k, val) for k, val in doc.metadata.model_dump().items()
                    if val is not None)
    with _At('mechanisms'):
        return MechanisedCausalGame(game, candidates, dependencies, structural,
                                    metadata=metadata)

def parse_model(text):
    """MechanisedCausalGame from model-file text."""
    doc = _load_document(text)
    return _build_mechanisms(doc, _build_game(doc))

def load_model(path):
    """parse_model on a file, or on a shipped fixture name."""
    if not os.path.exists(path):
        fixture = fixture_path(path)
        if fixture is None:
            raise _model_error('', _('no such model file or fixture: %s') % path)
        path = fixture
    with open(path, 'rb') as fo:
        return parse_model(fo.read())


########################################################################
#                 SERIALISATION
########################################################################

def _rows(cpt):
    return [[format_fraction(m) for m in row] for row in cpt.rows]

def model_to_dict(model):
    game = model.game
    doc = {'format_version': FORMAT_VERSION}
    if model.metadata:
        doc['metadata'] = dict(sorted(model.metadata.items()))
    doc['agents'] = list(game.agents)
    variables = []
    for v in game.graph.variables:
        spec = {'name': v,
                'domain': list(game.domains[v].labels),
                'parents': list(game.graph.parents[v]),
                'kind': game.kind[v]}
        owners = game.owners.get(v, ())
        if len(owners) == 1:
            spec['agent'] = owners[0]
        elif owners:
            spec['agents'] = list(owners)
        if game.kind[v] != DECISION:
            spec['cpt'] = _rows(game.cpts[v])
        if game.kind[v] == UTILITY:
            spec['utility'] = dict(
                (label, format_fraction(val)) for label, val in
                zip(game.domains[v].labels, game.utility_value[v]))
        variables.append(spec)
    doc['variables'] = variables
    mech = {}
    if model.restricted:
        mech['candidates'] = dict((v, [_rows(c) for c in model.candidates[v]])
                                  for v in sorted(model.restricted))
    if model.dependencies:
        mech['dependencies'] = dict(
            (v, [{'when': dict((w, _rows(c)) for w, c in sorted(when.items())),
                  'then': _rows(then)} for when, then in rule.cases])
            for v, rule in sorted(model.dependencies.items()))
    if model.structural:
        mech['structural'] = dict((v, [_rows(c)[0] for c in cs])
                                  for v, cs in sorted(model.structural.items()))
    if mech:
        doc['mechanisms'] = mech
    return doc

def serialise_model(model):
    """Canonical model-file text: sorted variables, 'p/q' numbers."""
    return json.dumps(model_to_dict(model), indent=2, sort_keys=True) + '\n'


########################################################################
#                 FIXTURES
########################################################################

FIXTURE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                           'fixtures')

def list_fixtures():
    names = []
    for fn in sorted(os.listdir(FIXTURE_DIR)):
        if fn.endswith('.json') and not fn.endswith('.expected.json'):
            names.append(fn[:-len('.json')])
    return names

def _fixture_name(name):
    base = os.path.basename(name)
    if base.endswith('.json'):
        base = base[:-len('.json')]
    return base

def fixture_path(name):
    """Path of a shipped fixture given 'mouse', 'fixtures/mouse' or
    'mouse.json'; None if there is no such fixture."""
    base = _fixture_name(name)
    path = os.path.join(FIXTURE_DIR, base + '.json')
    if os.path.exists(path):
        return path
    return None

def load_expected(name):
    """The committed identify output of a fixture, as a dict."""
    path = os.path.join(FIXTURE_DIR, _fixture_name(name) + '.expected.json')
    with open(path) as fo:
        return json.load(fo)
