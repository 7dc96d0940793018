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

"""mechgame command line tool.

usage: mechgame [options] COMMAND [ARGS]

commands:
  solve MODEL              equilibrium profile and expected utilities
  discover MODEL           edge-labelled mechanised graph from probing
  identify MODEL           game graph from probing
  mechanise MODEL          mechanised graph of the declared game graph
  roundtrip MODEL          left-inverse checks in both directions
  export-dot MODEL         DOT of the declared game graph (--graph game)
                           or of its mechanised graph (--graph mech)
  fixtures list            shipped fixtures
  fixtures run [NAME ...]  identify each fixture and compare with its
                           committed expected graph

MODEL is a model file path or the name of a shipped fixture
(mouse, fixtures/mouse, mouse.json).

options:
  --format FMT      text (default), json or dot
  --graph KIND      game or mech, for export-dot
  --budget N        probe budget for discovery
  --workers N       discovery threads
  --restricted-ok   no warning for restricted candidate sets
  --progress        probe progress meter on stderr
  -h, --help        this text

Exit status is 0 on success, 1 for model and usage errors and 2 for
algorithm errors, budget exhaustion included.  Diagnostics go to
standard error.
"""

import sys
import json
import getopt

from .core import MechGameError, _, _options, exception2msg, format_fraction
from .core import mechanism_of
from .discovery import GameGraph, discover, identify_agents
from .dot import export_dot
from .game import describe_profile, describe_utilities, expected_utility, solve
from .graphops import mechanise, verify_left_inverse_game
from .graphops import verify_left_inverse_mech
from .modelfile import fixture_path, list_fixtures, load_expected, load_model
from .oracle import ModelOracle
from .progress import TextMeter

FORMATS = ('text', 'json', 'dot')

def usage_error(msg):
    return MechGameError(11, msg)


########################################################################
#                 RENDERING
########################################################################

def _edge_lines(title, edges):
    lines = ['%s:' % title]
    for a, b in sorted(edges):
        lines.append('  %s -> %s' % (a, b))
    return lines

def game_graph_text(g):
    lines = []
    for v in g.nodes:
        colour = g.colour.get(v)
        lines.append('%-12s %-9s %s' % (v, g.kind[v],
                                         colour and ','.join(colour) or ''))
    lines += _edge_lines('edges', g.causal_edges - g.info_edges)
    lines += _edge_lines('information edges', g.info_edges)
    return '\n'.join(l.rstrip() for l in lines)

def mech_graph_text(c):
    lines = ['object nodes: %s' % ' '.join(c.object_nodes)]
    lines += _edge_lines('object edges', c.e_obj)
    lines += _edge_lines('functional edges', c.e_func)
    lines += _edge_lines('mechanism edges', c.e_mech - c.e_term)
    lines += _edge_lines('terminal edges', c.e_term)
    return '\n'.join(lines)

def solve_to_dict(game, profile):
    domains = game.domains
    out = {}
    for d in sorted(profile.rules):
        rule = profile[d]
        rules = []
        for ctx, action in zip(rule.contexts(), rule.actions):
            rules.append({'context': dict((p, domains[p].label(i))
                                          for p, i in ctx.items()),
                          'action': domains[d].label(action)})
        out[d] = {'parents': list(rule.parents), 'rules': rules}
    eu = dict((a, format_fraction(expected_utility(game, profile, a)))
              for a in game.agents)
    return {'profile': out, 'expected_utility': eu}

def _render(graph, fmt, text):
    if fmt == 'json':
        return json.dumps(graph.to_dict(), indent=2, sort_keys=True)
    if fmt == 'dot':
        return export_dot(graph).rstrip('\n')
    return text(graph)


########################################################################
#                 COMMANDS
########################################################################

class _Command:
    def __init__(self, opts, fmt, graph_kind, out, err):
        self.opts = opts
        self.fmt = fmt
        self.graph_kind = graph_kind
        self.out = out
        self.err = err

    def emit(self, text):
        self.out.write(text + '\n')

    def warn(self, text):
        self.err.write('mechgame: %s\n' % text)

    def model(self, args):
        if len(args) != 1:
            raise usage_error(_('expected exactly one MODEL argument'))
        return load_model(args[0])

    def oracle(self, model):
        if model.is_restricted() and not self.opts.restricted_ok:
            self.warn(_('warning: %s restricts the candidates of %s; the '
                        'discovery guarantees need full candidate sets')
                      % (model.name or 'model',
                         ', '.join(mechanism_of(v)
                                   for v in sorted(model.restricted))))
        return ModelOracle(model, self.opts)

    def do_solve(self, args):
        if self.fmt == 'dot':
            raise usage_error(_('solve has no dot output'))
        game = self.model(args).game
        profile = solve(game, (), self.opts)
        if self.fmt == 'json':
            self.emit(json.dumps(solve_to_dict(game, profile), indent=2,
                                 sort_keys=True))
        else:
            self.emit(', '.join(describe_profile(game, profile) +
                                describe_utilities(game, profile)))

    def do_discover(self, args):
        c = discover(self.oracle(self.model(args)), self.opts)
        self.emit(_render(c, self.fmt, mech_graph_text))

    def do_identify(self, args):
        g = identify_agents(discover(self.oracle(self.model(args)), self.opts))
        self.emit(_render(g, self.fmt, game_graph_text))

    def do_mechanise(self, args):
        g = GameGraph.from_game(self.model(args).game)
        self.emit(_render(mechanise(g), self.fmt, mech_graph_text))

    def do_roundtrip(self, args):
        model = self.model(args)
        game = verify_left_inverse_game(GameGraph.from_game(model.game))
        mech = verify_left_inverse_mech(discover(self.oracle(model), self.opts))
        if self.fmt == 'json':
            self.emit(json.dumps({'game': game.to_dict(),
                                  'mech': mech.to_dict()},
                                 indent=2, sort_keys=True))
            return
        for name, report in (('game', game), ('mech', mech)):
            status = report.ok and 'ok' or \
                     (report.precondition and 'FAILED' or 'precondition fails')
            self.emit('%s: %s: %s' % (name, status, report.diagnostic))
            for m in report.mismatches:
                self.emit('  %s' % m)

    def do_export_dot(self, args):
        g = GameGraph.from_game(self.model(args).game)
        if self.graph_kind == 'game':
            self.emit(export_dot(g, 'game').rstrip('\n'))
        elif self.graph_kind == 'mech':
            self.emit(export_dot(mechanise(g), 'mech').rstrip('\n'))
        else:
            raise usage_error(_('--graph must be game or mech'))

    def do_fixtures(self, args):
        if not args or args[0] not in ('list', 'run'):
            raise usage_error(_('usage: fixtures list|run [NAME ...]'))
        if args[0] == 'list':
            for name in list_fixtures():
                self.emit(name)
            return 0
        names = args[1:] or list_fixtures()
        failed = 0
        for name in names:
            if fixture_path(name) is None:
                raise usage_error(_('no such fixture: %s') % name)
            model = load_model(name)
            opts = self.opts.derive(restricted_ok=True)
            got = identify_agents(discover(ModelOracle(model, opts), opts))
            expected = game_graph_from_dict(load_expected(name))
            if got == expected:
                self.emit('%-20s ok' % name)
            else:
                failed += 1
                self.emit('%-20s FAILED' % name)
                for m in expected.differences(got):
                    self.emit('  %s' % m)
        return failed and 2 or 0

COMMANDS = {
    'solve': _Command.do_solve,
    'discover': _Command.do_discover,
    'identify': _Command.do_identify,
    'mechanise': _Command.do_mechanise,
    'roundtrip': _Command.do_roundtrip,
    'export-dot': _Command.do_export_dot,
    'fixtures': _Command.do_fixtures,
}

def _game_graph_args(d):
    return {'nodes': d['nodes'], 'kind': d['kind'],
            'colour': dict((v, tuple(c)) for v, c in d['colour'].items()),
            'causal_edges': [tuple(e) for e in d['causal_edges']],
            'info_edges': [tuple(e) for e in d['info_edges']]}

def game_graph_from_dict(d):
    """Inverse of GameGraph.to_dict."""
    return GameGraph(**_game_graph_args(d))


########################################################################
#                 MAIN
########################################################################

def parse_args(argv):
    try:
        optlist, args = getopt.gnu_getopt(
            argv, 'h', ['format=', 'graph=', 'budget=', 'workers=',
                        'restricted-ok', 'progress', 'help'])
    except getopt.GetoptError as e:
        raise usage_error(exception2msg(e))
    settings = {'format': 'text', 'graph': 'game', 'help': False}
    kwargs = {}
    for o, a in optlist:
        if o in ('-h', '--help'):
            settings['help'] = True
        elif o == '--format':
            if a not in FORMATS:
                raise usage_error(_('unknown format %r') % a)
            settings['format'] = a
        elif o == '--graph':
            settings['graph'] = a
        elif o in ('--budget', '--workers'):
            try:
                kwargs[o[2:]] = int(a)
            except ValueError:
                raise usage_error(_('%s needs an integer, not %r') % (o, a))
        elif o == '--restricted-ok':
            kwargs['restricted_ok'] = True
        elif o == '--progress':
            kwargs['progress_obj'] = TextMeter()
    return settings, kwargs, args

def main(argv=None, out=None, err=None):
    """Run one command; returns the exit status."""
    if argv is None: argv = sys.argv[1:]
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        settings, kwargs, args = parse_args(argv)
        if settings['help'] or not args:
            out.write(__doc__)
            return 0
        name, args = args[0], args[1:]
        if name not in COMMANDS:
            raise usage_error(_('unknown command %r') % name)
        opts = _options(None, kwargs)
        cmd = _Command(opts, settings['format'], settings['graph'], out, err)
        return COMMANDS[name](cmd, args) or 0
    except MechGameError as e:
        err.write('mechgame: error: %s\n' % exception2msg(e.strerror))
        partial = getattr(e, 'partial', None)
        if partial is not None:
            err.write('mechgame: %d edges found before the budget ran out\n'
                      % len(partial))
        if e.errno // 256 == 0:
            return 1
        return 2

if __name__ == '__main__':
    sys.exit(main())
