"""Upper bounds L, L', L'' on the synchronization length of any synchronizing extension.

All three bounds are read off the subset distance table of the automaton.
A set R with |R| >= 2 is *reducible* when some word maps it to a nonempty
set of smaller size; every other set is irreducible. Irreducible sets of one
size split into mutual-reachability classes (components); a path between two
members never leaves the class, so the global distance table gives the
in-component diameters directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .automaton import Automaton
from .kernels import INF, bound_tables
from .sync import SubsetDistances


@dataclass
class BoundReport:
    smallest_reachable_size: int
    m: int
    M: int
    m_k: dict
    l_k: dict
    c: int
    L: int
    Lprime: int
    Lpp: int
    Lpp_k: dict = field(default_factory=dict)
    Lpp_R: dict = field(default_factory=dict)
    legacy_lpp: bool = False

    def to_dict(self):
        return {
            "smallest_reachable_size": self.smallest_reachable_size,
            "m": self.m,
            "M": self.M,
            "m_k": {str(k): v for k, v in self.m_k.items()},
            "l_k": {str(k): v for k, v in self.l_k.items()},
            "c": self.c,
            "L": self.L,
            "Lprime": self.Lprime,
            "Lpp": self.Lpp,
            "Lpp_k": {str(k): v for k, v in self.Lpp_k.items()},
            "Lpp_R": {str(r): v for r, v in sorted(self.Lpp_R.items())},
            "legacy_lpp": self.legacy_lpp,
        }


def bound_report(aut: Automaton, legacy_lpp: bool = False, table: SubsetDistances | None = None) -> BoundReport:
    table = table if table is not None else SubsetDistances(aut)
    n = aut.n
    _, _, _, m_k, l_k, lpp_k, lpp_R, scal = bound_tables(table.D, table.sizes, n, legacy_lpp)
    s, m, M, c, L, Lprime, Lpp = (int(x) for x in scal)
    return BoundReport(
        smallest_reachable_size=s,
        m=m,
        M=M,
        m_k={k: int(m_k[k]) for k in range(2, s + 1)},
        l_k={k: int(l_k[k]) for k in range(2, s + 1)},
        c=c,
        L=L,
        Lprime=Lprime,
        Lpp=Lpp,
        Lpp_k={k: int(lpp_k[k]) for k in range(1, n + 1)},
        Lpp_R={int(R): int(lpp_R[R]) for R in np.flatnonzero(lpp_R < INF)},
        legacy_lpp=legacy_lpp,
    )


def bound_L(aut: Automaton) -> int:
    return bound_report(aut).L


def bound_Lprime(aut: Automaton) -> int:
    return bound_report(aut).Lprime


def bound_Lpp(aut: Automaton, legacy_lpp: bool = False) -> int:
    return bound_report(aut, legacy_lpp=legacy_lpp).Lpp
