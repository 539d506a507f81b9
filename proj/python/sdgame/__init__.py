"""Networked social-distancing game: solver, simulator and statistics.

Networks are given as a kind name ("star", "complete", "path") or a dict
such as {"node_count": 3, "edges": [[0, 1], [1, 2]]}. Parameters are
keyword arguments with the experiment's defaults (b=100, c=35, gamma=0.5).
"""

import json as _json

from . import _sdgame

__all__ = [
    "solve",
    "infection_probabilities",
    "two_terminal_reliability",
    "sweep",
    "simulate",
    "replay",
    "decision_csv",
    "analyze",
    "mann_whitney_u",
    "wilcoxon_signed_rank",
    "t_test",
    "detect_convergence",
    "sup_wald_break",
    "parse_client_message",
    "run_scripted_session",
    "HAS_SERVER",
    "LogError",
]

HAS_SERVER = bool(_sdgame.has_server)
LogError = _sdgame.LogError


def _params(alpha, benefit=100.0, cost=35.0, gamma=0.5, fine=0.0):
    return _json.dumps(
        {"alpha": alpha, "benefit": benefit, "cost": cost, "gamma": gamma, "fine": fine}
    )


def _net(network):
    return _json.dumps(network)


def solve(network="star", alpha=0.65, **params):
    return _json.loads(_sdgame.solve(_net(network), _params(alpha, **params)))


def infection_probabilities(network, distancing, alpha, **params):
    """p_i for every node, given the list of distancing nodes."""
    return _sdgame.infection_probabilities(_net(network), list(distancing), _params(alpha, **params))


def two_terminal_reliability(network, open_nodes, source, target, alpha):
    return _sdgame.two_terminal_reliability(_net(network), list(open_nodes), source, target, alpha)


def sweep(networks=("complete", "star"), step=0.005, **params):
    names = [n if isinstance(n, str) else f"net{i}" for i, n in enumerate(networks)]
    return _json.loads(
        _sdgame.sweep(names, [_net(n) for n in networks], _params(0.0, **params), step)
    )


def simulate(config=None, policies=("StaticEquilibrium",), seed=1):
    """Runs one 40-round session; returns the JSONL log as a string."""
    return _sdgame.simulate(_json.dumps(config or {}), [_json.dumps(p) for p in policies], seed)


def replay(log):
    return _json.loads(_sdgame.replay(log))


def decision_csv(log):
    return _sdgame.decision_csv(log)


def analyze(logs, first=11, last=20, k=4, a=2, permutations=999, seed=1):
    return _json.loads(_sdgame.analyze(list(logs), first, last, k, a, permutations, seed))


def mann_whitney_u(x, y, alternative="two-sided"):
    return _json.loads(_sdgame.mann_whitney_u(list(x), list(y), alternative))


def wilcoxon_signed_rank(x, y, alternative="two-sided"):
    return _json.loads(_sdgame.wilcoxon_signed_rank(list(x), list(y), alternative))


def t_test(x, y, paired=False, alternative="two-sided"):
    return _json.loads(_sdgame.t_test(list(x), list(y), paired, alternative))


def detect_convergence(decisions, roles, k=4, a=2):
    return _json.loads(_sdgame.detect_convergence([bool(d) for d in decisions], list(roles), k, a))


def sup_wald_break(series, trim=4, permutations=999, seed=1):
    return _json.loads(_sdgame.sup_wald_break(list(series), trim, permutations, seed))


def parse_client_message(text):
    if not HAS_SERVER:
        raise RuntimeError("built without the session server")
    return _json.loads(_sdgame.parse_client_message(text))


def run_scripted_session(options=None, seed=1, clients=5, client_seed=1):
    """Plays a session through the server protocol with scripted clients."""
    if not HAS_SERVER:
        raise RuntimeError("built without the session server")
    return _json.loads(_sdgame.run_scripted_session(_json.dumps(options or {}), seed, clients, client_seed))
