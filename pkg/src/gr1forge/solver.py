"""GR(1) triple fixpoint and strategy extraction."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional

from .bdd import NodeRef
from .game import GameStructure, cpre

__all__ = [
    "WinningCertificate", "StrategyRelation", "UnrealizableError",
    "solve", "is_realizable", "synthesize", "outer_value",
]

log = logging.getLogger(__name__)


class UnrealizableError(RuntimeError):
    pass


@dataclass
class WinningCertificate:
    """Winning region plus the iterates needed for strategy extraction.

    ``y_layers[j]`` is the list ``Y_j[0] = FALSE, Y_j[1], ...`` of the
    least-fixpoint iterates for system goal ``j`` computed at ``Z = win``;
    ``x_witness[j][r][i]`` is the inner greatest fixpoint for env goal ``i``
    that produced layer ``r``.
    """

    win: NodeRef
    y_layers: List[List[NodeRef]]
    x_witness: List[List[List[NodeRef]]]
    iterations: int = 0


@dataclass
class StrategyRelation:
    rel: NodeRef
    n_goals: int
    game: GameStructure = field(repr=False)


def _goal_fixpoint(g: GameStructure, z: NodeRef, j: int, warm=None):
    """``mu Y. OR_i nu X. (J_j & cpre Z) | cpre Y | (!Je_i & cpre X)``.

    Returns the layers ``[FALSE, Y1, ...]`` and the inner fixpoints that
    produced each layer.  ``warm`` holds witnesses from a run at a larger
    ``z``; by monotonicity they bound the new inner fixpoints from above
    and serve as starting points.
    """
    bdd = g.bdd
    goal = g.fair_s[j] & cpre(g, z)
    y = bdd.false
    layers = [y]
    witness: List[List[NodeRef]] = [[]]
    while True:
        r = len(layers)
        start = goal | cpre(g, y)
        y_new = bdd.false
        xs = []
        for i, je in enumerate(g.fair_e):
            x = z
            if warm is not None and r < len(warm):
                x = z & warm[r][i]
            nje = ~je
            while True:
                x_new = start | (nje & cpre(g, x))
                if x_new == x:
                    break
                x = x_new
            xs.append(x)
            y_new = y_new | x
        if y_new == y:
            break
        layers.append(y_new)
        witness.append(xs)
        y = y_new
    return y, layers, witness


def outer_value(g: GameStructure, z: NodeRef) -> NodeRef:
    """One application of the outer operator: ``AND_j muY...`` at ``z``."""
    r = g.bdd.true
    for j in range(g.n_goals):
        y, _, _ = _goal_fixpoint(g, z, j)
        r = r & y
    return r


def solve(g: GameStructure) -> WinningCertificate:
    """Greatest ``Z`` with ``Z <= AND_j muY OR_i nuX [...]`` and its layers."""
    z = g.bdd.true
    it = 0
    warm: List[Optional[list]] = [None] * g.n_goals
    layers: List[List[NodeRef]] = [[] for _ in range(g.n_goals)]
    while True:
        it += 1
        z_new = z
        for j in range(g.n_goals):
            y, layers[j], wj = _goal_fixpoint(g, z, j, warm[j])
            warm[j] = wj
            z_new = z_new & y
        log.debug("outer iteration %d: %d nodes", it, len(z_new))
        if z_new == z:
            break
        z = z_new
    # at the fixpoint each goal's least fixpoint equals z, so the recorded
    # layers and witnesses belong to the final winning region
    return WinningCertificate(z, layers, warm, it)


def is_realizable(g: GameStructure, cert: WinningCertificate) -> bool:
    """``forall X. (exists Y. init_e) -> exists Y. (init_e & init_s & win)``."""
    bdd = g.bdd
    env_ok = bdd.exists(g.y_vars, g.init_e)
    sys_ok = bdd.exists(g.y_vars, g.init_e & g.init_s & cert.win)
    return (env_ok & ~sys_ok).is_false


def synthesize(g: GameStructure, cert: WinningCertificate) -> StrategyRelation:
    """Strategy relation over current, next and goal-counter variables.

    For counter value ``j`` the moves are:

    * advance: the source satisfies sys goal ``j``; go anywhere in ``win``
      and set the counter to ``j+1 mod n``;
    * descend: the source sits in layer ``r`` of goal ``j`` (and in no lower
      layer); move into layer ``r-1``;
    * wait: the source sits in layer ``r`` with env goal ``i`` its first
      witness, violates env goal ``i``; stay inside that witness.

    The layer/witness restrictions on the source make the rank
    ``(layer, env goal)`` non-increasing while the counter stays at ``j``.
    """
    if not is_realizable(g, cert):
        raise UnrealizableError("specification is unrealizable")
    bdd = g.bdd
    n = g.n_goals
    win = cert.win
    win_p = g.prime(win)
    moves = bdd.false
    for j in range(n):
        cj = g.counter_value(j)
        stay = g.counter_value(j, primed=True)
        adv = g.counter_value((j + 1) % n, primed=True)
        moves = moves | (cj & win & g.fair_s[j] & win_p & adv)
        layers = cert.y_layers[j]
        for r in range(1, len(layers)):
            fresh = layers[r] & ~layers[r - 1]
            if fresh.is_false:
                continue
            moves = moves | (cj & fresh & g.prime(layers[r - 1]) & stay)
            seen = bdd.false
            for i, x in enumerate(cert.x_witness[j][r]):
                src = fresh & x & ~seen & ~g.fair_e[i]
                seen = seen | x
                if src.is_false:
                    continue
                moves = moves | (cj & src & g.prime(x) & stay)
        bdd.clear_caches_if_large()
    rel = moves & g.trans_s
    return StrategyRelation(rel, n, g)
