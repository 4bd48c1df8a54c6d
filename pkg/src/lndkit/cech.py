"""Čech 1-cocycles on covers by principal opens, and bounded coboundary search.

Sign convention: a transition ``g[i, j]`` lives on the overlap of charts
``i`` and ``j`` and a coboundary satisfies ``g[i, j] = h[j] - h[i]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

from .ideal import BudgetExceeded
from .linalg import solve
from .polyring import Poly
from .report import Report, reporting
from .scheme import PolyLike, Scheme, SchemeError, cyclotomic, inverse_name, make_scheme

MAX_ANSATZ = 20000


def _partner(base: Scheme, f: Poly, label: str) -> str:
    vs = f.variables()
    if len(f) == 1 and len(vs) == 1 and f == base.var(vs[0]):
        return inverse_name(vs[0])
    return label


@dataclass
class CoverDatum:
    """Charts ``D(f_i)`` of ``base`` with transitions on pairwise overlaps.

    ``glue`` is inverted on every overlap in addition to the chart elements;
    it models covers whose charts meet only over a smaller open set.
    """

    base: Scheme
    elements: List[Poly]
    transitions: Dict[Tuple[int, int], Poly] = field(default_factory=dict)
    glue: Optional[Poly] = None
    name: str = ""

    def __post_init__(self):
        self.elements = [self.base.poly(f) for f in self.elements]
        if self.glue is not None:
            self.glue = self.base.poly(self.glue)

    def __len__(self) -> int:
        return len(self.elements)

    def _localizers(self, idx: Sequence[int], with_glue: bool) -> Dict[str, Poly]:
        out: Dict[str, Poly] = {}
        for i in idx:
            f = self.elements[i]
            if not f.is_constant():
                out[_partner(self.base, f, f"w{i}")] = f
        if with_glue and self.glue is not None and not self.glue.is_constant():
            out[_partner(self.base, self.glue, "w_glue")] = self.glue
        return out

    def chart(self, i: int) -> Scheme:
        return self.base.localize_many(self._localizers([i], False))

    def overlap(self, *idx: int) -> Scheme:
        return self.base.localize_many(self._localizers(sorted(set(idx)), len(set(idx)) > 1))

    def set_transition(self, i: int, j: int, g: PolyLike) -> None:
        if i == j:
            raise SchemeError("transitions need two distinct charts")
        self.transitions[(i, j)] = self.overlap(i, j).poly(g)

    def transition(self, i: int, j: int) -> Optional[Poly]:
        if (i, j) in self.transitions:
            return self.transitions[(i, j)]
        if (j, i) in self.transitions:
            return -self.transitions[(j, i)]
        return None


def cocycle_check(c: CoverDatum, name: str = None) -> Report:
    """Antisymmetry on overlaps and ``g_ij + g_jk = g_ik`` on triple overlaps."""
    with reporting(name or f"cocycle({c.name or 'cover'})") as rep:
        for (i, j), g in sorted(c.transitions.items()):
            if (j, i) in c.transitions and i < j:
                O = c.overlap(i, j)
                h = c.transitions[(j, i)]
                rep.check(f"antisymmetric[{i},{j}]", O.contains(g + h), sum=O.nf(g + h))
        triples = 0
        for i, j, k in combinations(range(len(c)), 3):
            gs = [c.transition(i, j), c.transition(j, k), c.transition(i, k)]
            if any(g is None for g in gs):
                continue
            triples += 1
            O = c.overlap(i, j, k)
            d = O.nf(gs[0].rebase(O.vars) + gs[1].rebase(O.vars) - gs[2].rebase(O.vars))
            rep.check(f"triple[{i},{j},{k}]", d.is_zero(), triple=[i, j, k], defect=d)
        rep.witnesses["triples"] = triples
    return rep


def _ansatz(chart: Scheme, degree_bound: int, pole_bound: int) -> List[Poly]:
    """Monomials with ambient degree <= ``degree_bound``, each localization
    partner to a power <= ``pole_bound``, constants below their cyclotomic
    degree; reduced to distinct normal forms."""
    vars = chart.vars
    ambient = [n for n in chart.vars.names if n not in chart.partners and n not in chart.constants]
    partners = list(chart.partners)
    consts = []
    if chart.roots_of_unity:
        eps, m = chart.roots_of_unity
        consts.append((eps, len(cyclotomic(m)) - 2))
    consts += [(p, degree_bound) for p in chart.vars.names if chart.vars.is_param(p)]

    def exps(k, bound):
        if k == 0:
            yield ()
            return
        for a in range(bound + 1):
            for rest in exps(k - 1, bound - a):
                yield (a,) + rest

    ranges = [list(exps(len(ambient), degree_bound))]
    ranges += [[(a,) for a in range(pole_bound + 1)] for _ in partners]
    ranges += [[(a,) for a in range(b + 1)] for _, b in consts]
    names = ambient + partners + [n for n, _ in consts]
    idx = [vars.index(n) for n in names]
    seen = set()
    out = []
    for parts in product(*ranges):
        flat = [a for part in parts for a in part]
        e = [0] * len(vars)
        for i, a in zip(idx, flat):
            e[i] = a
        nf = chart.nf(Poly.monomial(vars, tuple(e)))
        if nf.is_zero() or nf in seen:
            continue
        seen.add(nf)
        out.append(nf)
        if len(out) > MAX_ANSATZ:
            raise BudgetExceeded("coboundary ansatz", MAX_ANSATZ)
    return out


def coboundary_solve(c: CoverDatum, degree_bound: int = 6, pole_bound: int = 6
                     ) -> Optional[Dict[int, Poly]]:
    """``h`` with ``g[i, j] = h[j] - h[i]`` on every overlap with a transition,
    searched over a bounded ansatz; ``None`` means no solution within bounds."""
    charts = [c.chart(i) for i in range(len(c))]
    ansatz = [_ansatz(X, degree_bound, pole_bound) for X in charts]
    pairs = sorted(c.transitions)
    overlaps = {p: c.overlap(*p) for p in pairs}
    columns: List[Dict] = []
    owner: List[Tuple[int, Poly]] = []
    for i, monos in enumerate(ansatz):
        for mono in monos:
            col: Dict = {}
            for (a, b) in pairs:
                if i not in (a, b):
                    continue
                O = overlaps[(a, b)]
                sign = 1 if i == b else -1
                for e, v in O.nf(mono.rebase(O.vars)).terms.items():
                    key = ((a, b), e)
                    col[key] = col.get(key, 0) + sign * v
            columns.append({k: v for k, v in col.items() if v})
            owner.append((i, mono))
    rhs = {}
    for p in pairs:
        O = overlaps[p]
        for e, v in O.nf(c.transitions[p]).terms.items():
            rhs[(p, e)] = v
    sol = solve(columns, rhs)
    if sol is None:
        return None
    h = {i: Poly(X.vars) for i, X in enumerate(charts)}
    for j, v in sol.items():
        i, mono = owner[j]
        h[i] = h[i] + mono * Fraction(v)
    for (a, b) in pairs:
        O = overlaps[(a, b)]
        if not O.equal(h[b].rebase(O.vars) - h[a].rebase(O.vars), c.transitions[(a, b)]):
            raise AssertionError("coboundary certificate failed")
    return h


def coboundary_report(c: CoverDatum, degree_bound: int = 6, pole_bound: int = 6,
                      expect: bool = True, name: str = None) -> Report:
    """Pass when the bounded search outcome matches ``expect``."""
    with reporting(name or f"coboundary({c.name or 'cover'})") as rep:
        h = coboundary_solve(c, degree_bound, pole_bound)
        rep.witnesses["bounds"] = {"degree": degree_bound, "pole": pole_bound}
        if h is None:
            rep.notes.append("no solution within bounds")
        else:
            rep.witnesses["coboundary"] = {str(i): p for i, p in h.items()}
        rep.check("solvable" if expect else "no-solution-within-bounds", (h is not None) == expect)
    return rep


def punctured_plane(transition: str, name: str = "") -> CoverDatum:
    """``A^2 minus origin`` covered by ``D(x)`` and ``D(y)``."""
    base = make_scheme(["x", "y"], name="A2")
    c = CoverDatum(base, [base.var("x"), base.var("y")], name=name or f"punctured_plane({transition})")
    c.set_transition(0, 1, transition)
    return c
