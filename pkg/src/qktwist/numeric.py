"""Pointwise exact evaluation of forms, including one level of d via jets.

The sampled verification mode evaluates whole pipelines at rational points.
Components become field elements or jets; wedge products and contractions are
carried out numerically, and the exterior derivative of a jet-valued form
reads the stored gradients instead of expanding symbolic derivatives.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Tuple

from .chart import Chart, Point
from .forms import DifferentialForm, VectorField, _merge_indices
from .jets import Jet, coefficient_jet
from .scalars import fe_is_zero


class PointEnv:
    """Chart data evaluated once per sample point."""

    def __init__(self, point: Point):
        self.chart = point.chart
        self.point = point
        self.values = point.values
        self.nvars = self.chart.ring.nvars
        self.scalar_diff_vals = [
            {idx: c.eval_at(self.values, where=idx) for idx, c in form.comps.items()}
            for form in self.chart.scalar_diffs
        ]
        self.structure_vals = [
            {idx: c.eval_at(self.values, where=idx) for idx, c in form.comps.items()}
            for form in self.chart.structure
        ]


def _jet_or_value_zero(x) -> bool:
    if isinstance(x, Jet):
        return fe_is_zero(x.val) and all(fe_is_zero(g) for g in x.grad)
    return fe_is_zero(x)


def _accumulate(out, idx, value):
    cur = out.get(idx)
    total = value if cur is None else cur + value
    if _jet_or_value_zero(total):
        out.pop(idx, None)
    else:
        out[idx] = total


def form_values(form: DifferentialForm, env: PointEnv) -> Dict:
    return {idx: c.eval_at(env.values, where=idx) for idx, c in form.comps.items()}


def form_jets(form: DifferentialForm, env: PointEnv) -> Dict:
    return {idx: coefficient_jet(c, env.values, where=idx) for idx, c in form.comps.items()}


def vector_values(X: VectorField, env: PointEnv) -> List:
    return [c.eval_at(env.values) for c in X.comps]


def vector_jets(X: VectorField, env: PointEnv) -> List[Jet]:
    return [coefficient_jet(c, env.values) for c in X.comps]


def numeric_wedge(a: Dict, b: Dict) -> Dict:
    out: Dict = {}
    for ia, ca in a.items():
        for ib, cb in b.items():
            merged = _merge_indices(ia, ib)
            if merged is None:
                continue
            sign, idx = merged
            term = ca * cb
            if sign < 0:
                term = -term
            _accumulate(out, idx, term)
    return out


def numeric_add(a: Dict, b: Dict, sign: int = 1) -> Dict:
    out = dict(a)
    for idx, v in b.items():
        _accumulate(out, idx, v if sign > 0 else -v)
    return out


def numeric_scale(a: Dict, s) -> Dict:
    out = {}
    for idx, v in a.items():
        term = v * s
        if not _jet_or_value_zero(term):
            out[idx] = term
    return out


def numeric_contract(xcomps: List, form: Dict) -> Dict:
    """Interior product with component values (or jets) of a vector field."""
    out: Dict = {}
    for idx, coeff in form.items():
        for pos in range(len(idx)):
            xc = xcomps[idx[pos]]
            if _jet_or_value_zero(xc):
                continue
            rest = idx[:pos] + idx[pos + 1:]
            term = coeff * xc
            if pos % 2:
                term = -term
            _accumulate(out, rest, term)
    return out


def numeric_d(jet_form: Dict, env: PointEnv) -> Dict:
    """Exterior derivative at the point of a form given by jet components.

    Output components are plain field elements (the jet level is consumed).
    """
    out: Dict = {}
    for idx, jet in jet_form.items():
        for s in range(env.nvars):
            g = jet.grad[s]
            if fe_is_zero(g):
                continue
            for sidx, sval in env.scalar_diff_vals[s].items():
                merged = _merge_indices(sidx, idx)
                if merged is None:
                    continue
                sign, target = merged
                term = g * sval
                _accumulate(out, target, -term if sign < 0 else term)
        val = jet.val
        if fe_is_zero(val):
            continue
        for pos in range(len(idx)):
            struct = env.structure_vals[idx[pos]]
            if not struct:
                continue
            rest = idx[:pos] + idx[pos + 1:]
            base_sign = -1 if pos % 2 else 1
            for pair, sval in struct.items():
                merged = _merge_indices(pair, rest)
                if merged is None:
                    continue
                sign, target = merged
                term = val * sval
                _accumulate(out, target, -term if sign * base_sign < 0 else term)
    return out


def jet_values(jet_form: Dict) -> Dict:
    """Drop the gradient level."""
    return {idx: j.val for idx, j in jet_form.items() if not fe_is_zero(j.val)}


def numeric_is_zero(form: Dict) -> bool:
    return all(_jet_or_value_zero(v) for v in form.values())
