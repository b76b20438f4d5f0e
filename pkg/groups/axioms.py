# groups/axioms.py
"""
Verificação dos axiomas de grupo sobre uma bola (controle de bugs do catálogo).
"""
from __future__ import annotations

import itertools
import logging
import random
from typing import List, Optional

from lib.reports import CheckReport

from .base import GroupElement, MarkedGroup

logger = logging.getLogger(__name__)

# acima disso, triplas amostradas em vez de exaustivas
MAX_TRIPLES = 20_000


def check_group_axioms(
    g: MarkedGroup,
    sample_radius: int,
    seed: int = 0,
    max_triples: int = MAX_TRIPLES,
    elements: Optional[List[GroupElement]] = None,
) -> CheckReport:
    """
    Associatividade, identidade e inversos em B_r (todas as triplas, ou uma
    amostra semeada acima de ``max_triples``), mais (xy)⁻¹ = y⁻¹x⁻¹ e as
    relações do catálogo nos geradores.
    """
    from lib.cayley import build_ball

    grp = g.group
    ball = elements if elements is not None else build_ball(g, sample_radius).elements
    report = CheckReport(name=f"group axioms {g.label} r={sample_radius}")
    e = grp.identity()

    for x in ball:
        report.record(grp.mul(x, e) == x and grp.mul(e, x) == x, witness={"identity": repr(x)})
        report.record(grp.is_identity(grp.mul(x, grp.inv(x))), witness={"inverse": repr(x)})

    n = len(ball)
    if n ** 3 <= max_triples:
        triples = itertools.product(ball, repeat=3)
    else:
        rng = random.Random(seed)
        triples = ((rng.choice(ball), rng.choice(ball), rng.choice(ball)) for _ in range(max_triples))
        report.details["sampled"] = max_triples
    for x, y, z in triples:
        good = grp.mul(grp.mul(x, y), z) == grp.mul(x, grp.mul(y, z))
        good = good and grp.inv(grp.mul(x, y)) == grp.mul(grp.inv(y), grp.inv(x))
        report.record(good, witness={"triple": [repr(x), repr(y), repr(z)]})

    for w in g.relators:
        report.record(grp.is_identity(g.evaluate(w)), witness={"relator": g.word_label(w)})

    logger.info(report.summary_line())
    return report
