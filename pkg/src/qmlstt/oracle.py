"""Exhaustive cross-checks between the Kripke and the finite-frame semantics.

Three suites:

* ``lemma1`` -- world-wise agreement of ``M, g, w |= phi`` with the value of
  the embedded formula applied to ``w`` in the frame built from ``M``;
* ``transfer`` -- validity of a formula over all enumerated models agrees
  with validity of ``valid phi`` over the corresponding frames;
* ``lemma3`` -- every model read off a standard frame passes the QKpi
  closure check.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable

from . import henkin, kripke, qml
from .embedding import MVALID, embed, inline, pred_const, rel_const, replace_constants
from .errors import QmlSttError
from .qml import Atom, Box, ForallInd, ForallProp, Formula, Not, Or, PropVar, QmlSignature
from .stt import IOTA, MU, PROP, App, Var, free_vars


@dataclass
class OracleReport:
    suite: str
    params: dict[str, Any] = field(default_factory=dict)
    models: int = 0
    formulas: int = 0
    instances: int = 0
    agreements: int = 0
    disagreements: int = 0
    counterexample: dict[str, Any] | None = None
    extra: dict[str, Any] = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return self.disagreements == 0

    def record(self, agree: bool, counterexample: dict[str, Any] | None = None) -> None:
        self.instances += 1
        if agree:
            self.agreements += 1
        else:
            self.disagreements += 1
            if self.counterexample is None:
                self.counterexample = counterexample

    def merge(self, other: "OracleReport") -> "OracleReport":
        """Combine two partial runs of the same suite (first counterexample wins)."""
        out = OracleReport(self.suite, dict(self.params))
        out.models = self.models + other.models
        out.formulas = max(self.formulas, other.formulas)
        out.instances = self.instances + other.instances
        out.agreements = self.agreements + other.agreements
        out.disagreements = self.disagreements + other.disagreements
        out.counterexample = self.counterexample or other.counterexample
        out.extra = {**other.extra, **self.extra}
        out.elapsed = self.elapsed + other.elapsed
        return out

    def to_json(self) -> dict[str, Any]:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def render(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        params = " ".join(f"{k}={v}" for k, v in self.params.items())
        lines = [
            f"[{status}] {self.suite} ({params})",
            f"  models={self.models} formulas={self.formulas} instances={self.instances}",
            f"  agreements={self.agreements} disagreements={self.disagreements} time={self.elapsed:.2f}s",
        ]
        for k, v in self.extra.items():
            lines.append(f"  {k}: {v}")
        if self.counterexample is not None:
            lines.append("  counterexample: " + json.dumps(self.counterexample, sort_keys=True))
        return "\n".join(lines)


# -- formula generation --------------------------------------------------------


def enumerate_formulas(
    sig: QmlSignature,
    depth: int,
    max_ind_vars: int = 2,
    max_prop_vars: int = 2,
    max_formulas: int | None = None,
) -> list[Formula]:
    """All formulas up to ``depth`` over a slice of the signature, modulo bound renaming.

    Disjunctions are taken once per unordered pair.  If ``max_formulas`` is
    given and exceeded, every formula below the top depth is kept and the
    top layer is thinned by an even stride (deterministic).
    """
    ivs = sorted(sig.ind_vars)[:max_ind_vars]
    pvs = sorted(sig.prop_vars)[:max_prop_vars]
    atoms: list[Formula] = [PropVar(p) for p in pvs]
    for k, n in sorted(sig.preds.items()):
        atoms.extend(Atom(k, args) for args in itertools.product(ivs, repeat=n))
    seen: set = set()
    layers: list[list[Formula]] = []

    def add(layer: list[Formula], phi: Formula) -> None:
        key = qml.alpha_key(phi)
        if key not in seen:
            seen.add(key)
            layer.append(phi)

    first: list[Formula] = []
    for a in atoms:
        add(first, a)
    layers.append(first)
    for d in range(1, depth + 1):
        prev = layers[d - 1]
        below = [f for layer in layers for f in layer]
        layer: list[Formula] = []
        for a in prev:
            add(layer, Not(a))
            for r in sorted(sig.rels):
                add(layer, Box(r, a))
            for x in ivs:
                add(layer, ForallInd(x, a))
            for p in pvs:
                add(layer, ForallProp(p, a))
        top = len(below) - len(prev)
        for i, a in enumerate(below):
            for j in range(max(i, top), len(below)):
                add(layer, Or(a, below[j]))
        layers.append(layer)
    out = [f for layer in layers[:-1] for f in layer]
    last = layers[-1]
    if max_formulas is not None and len(out) + len(last) > max_formulas:
        room = max(max_formulas - len(out), 0)
        if room:
            stride = len(last) / room
            last = [last[int(i * stride)] for i in range(room)]
        else:
            last = []
    return out + last


# -- helpers -----------------------------------------------------------------


def _dotted(phi: Formula) -> tuple[list[Var], list[str], list[str]]:
    iv, pv = qml.free_vars(phi)
    ivs, pvs = sorted(iv), sorted(pv)
    return [Var(x, IOTA) for x in ivs] + [Var(p, PROP) for p in pvs], ivs, pvs


def _check_freeness(t, phi: Formula) -> None:
    # embedded formulas only have dotted individual/propositional variables free
    allowed, _, _ = _dotted(phi)
    extra = free_vars(t) - set(allowed)
    if extra:
        raise QmlSttError(f"embedding of {qml.print_qml(phi)} has unexpected free variables {extra}")


def _cx(M: kripke.KripkeModel, g: kripke.QmlAssignment | None, w: int | None, phi: Formula, kv: bool, hv: bool) -> dict:
    return {
        "model": kripke.model_to_json(M),
        "assignment": kripke.assignment_to_json(g) if g is not None else None,
        "world": w,
        "formula": qml.print_qml(phi),
        "kripke": kv,
        "henkin": hv,
    }


# -- suites ------------------------------------------------------------------


def check_lemma1(
    sig: QmlSignature,
    max_w: int,
    max_d: int,
    formula_depth: int,
    *,
    formulas: Iterable[Formula] | None = None,
    max_formulas: int | None = None,
    model_limit: int | None = kripke.DEFAULT_MODEL_LIMIT,
) -> OracleReport:
    """World-wise agreement of both semantics over all powerset models up to the bounds."""
    start = time.perf_counter()
    report = OracleReport("lemma1", {"max_w": max_w, "max_d": max_d, "depth": formula_depth})
    phis = list(formulas) if formulas is not None else enumerate_formulas(sig, formula_depth, max_formulas=max_formulas)
    report.formulas = len(phis)
    world = Var("W", MU)
    # signature constants become leading environment slots, so each formula
    # is compiled once per (|W|, |D|) layer rather than once per model
    consts = [rel_const(r) for r in sorted(sig.rels)] + [pred_const(k, n) for k, n in sorted(sig.preds.items())]
    slots = [Var(f"_{c.name}", c.type) for c in consts]
    table = dict(zip(consts, slots))
    prepared = []
    for phi in phis:
        e = embed(phi, sig)
        _check_freeness(e, phi)
        dotted, ivs, pvs = _dotted(phi)
        prepared.append((phi, replace_constants(App(e, world), table), dotted, ivs, pvs))
    compiled: dict[tuple[int, int], list] = {}
    # models come smallest first, so the first counterexample has minimal |W|
    for M in kripke.enumerate_models(sig, max_w, max_d, "powerset", limit=model_limit):
        report.models += 1
        F = henkin.frame_from_kripke(M)
        shape = (M.n_worlds, M.n_individuals)
        if shape not in compiled:
            compiled = {shape: [F.compile(term, slots + dv + [world]) for _, term, dv, _, _ in prepared]}
        consts_env = tuple(F.interp[c.name] for c in consts)
        for (phi, _, dotted, ivs, pvs), code in zip(prepared, compiled[shape]):
            for g in kripke.assignments(M, ivs, pvs):
                lifted = henkin.qml_assignment_to_stt(g, F)
                base = consts_env + tuple(lifted[v] for v in dotted)
                for w in M.worlds:
                    kv = kripke.satisfies(M, g, w, phi)
                    hv = code(base + (w,))
                    report.record(kv == hv, None if kv == hv else _cx(M, g, w, phi, kv, hv))
    report.elapsed = time.perf_counter() - start
    return report


def henkin_valid(F: henkin.FiniteFrame, phi: Formula) -> bool:
    """``valid phi`` (operators inlined, not normalized) is true under every assignment."""
    return F.is_valid(inline(App(MVALID, embed(phi, named=True))))


def check_validity_transfer(
    phi: Formula,
    sig: QmlSignature,
    max_w: int,
    max_d: int,
    *,
    model_limit: int | None = kripke.DEFAULT_MODEL_LIMIT,
) -> OracleReport:
    """Model-by-model agreement of Kripke validity and validity of the embedded formula."""
    qml.check(phi, sig)
    start = time.perf_counter()
    report = OracleReport("transfer", {"formula": qml.print_qml(phi), "max_w": max_w, "max_d": max_d})
    report.formulas = 1
    k_counter = h_counter = 0
    for M in kripke.enumerate_models(sig, max_w, max_d, "powerset", limit=model_limit):
        report.models += 1
        kv = kripke.is_valid_in_model(M, phi)
        hv = henkin_valid(henkin.frame_from_kripke(M), phi)
        k_counter += not kv
        h_counter += not hv
        report.record(kv == hv, None if kv == hv else _cx(M, None, None, phi, kv, hv))
    report.extra = {
        "kripke_countermodels": k_counter,
        "henkin_countermodels": h_counter,
        "valid_at_bound": k_counter == 0 and h_counter == 0,
    }
    report.elapsed = time.perf_counter() - start
    return report


LEMMA3_SIGNATURE = QmlSignature(ind_vars={"X"}, prop_vars={"P"}, preds={"p": 1}, rels={"r"})


def check_lemma3(max_w: int, max_d: int = 1, sig: QmlSignature = LEMMA3_SIGNATURE) -> OracleReport:
    """Every model induced by a standard frame with ``|D_mu| <= max_w`` is QKpi."""
    if max_w > 3:
        raise kripke.ResourceBound("lemma3 is exhaustive over frames; max_w must be at most 3")
    start = time.perf_counter()
    report = OracleReport("lemma3", {"max_w": max_w, "max_d": max_d})
    by_class: dict[str, int] = {}
    for nw in range(1, max_w + 1):
        for nd in range(1, max_d + 1):
            for F in henkin.enumerate_frames(sig, nw, nd):
                M = henkin.kripke_from_frame(F, sig)
                report.models += 1
                cls = kripke.classify(M)
                by_class[cls.value] = by_class.get(cls.value, 0) + 1
                ok = cls is not kripke.ModelClass.QKPI_MINUS and M.is_powerset()
                cx = None if ok else {"model": kripke.model_to_json(M), "class": cls.value}
                report.record(ok, cx)
    report.extra = {"classes": by_class}
    report.elapsed = time.perf_counter() - start
    return report
