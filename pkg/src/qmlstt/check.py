"""Problem files and bounded validity checking with countermodel search."""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field
from typing import Any

from . import kripke, qml
from .errors import ParseError, QmlSttError, ResourceBound
from .qml import Formula, QmlSignature


class InternalError(QmlSttError):
    """A result failed its own re-verification."""


@dataclass(frozen=True)
class ProblemFile:
    signature: QmlSignature
    conjecture: Formula
    axioms: tuple[Formula, ...] = ()
    name: str = "conjecture"


_DECL = re.compile(r"^(rel|pred|propvar|indvar)\s+(.*)$")
_FORMULA = re.compile(r"^(axiom|conjecture)\s*:(.*)$")
_PRED = re.compile(r"^([a-z][A-Za-z0-9_]*)/(\d+)$")


def _names(text: str) -> list[str]:
    return [x for x in re.split(r"[\s,]+", text.strip()) if x]


def parse_problem(text: str, name: str = "conjecture") -> ProblemFile:
    """Parse the line-oriented problem format.

    Declarations (``rel r``, ``pred p/1``, ``propvar P``, ``indvar X``) come
    first, then ``axiom:`` and exactly one ``conjecture:`` line.  Indented
    lines continue the previous formula; ``%`` starts a comment.  Without
    any ``rel`` declaration the single relation ``r`` is assumed.
    """
    rels: list[str] = []
    preds: dict[str, int] = {}
    pvs: list[str] = []
    ivs: list[str] = []
    formulas: list[tuple[str, int, int, str]] = []  # role, line, col, text
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0].rstrip()
        if not line.strip():
            continue
        if raw[:1].isspace() and formulas:
            role, ln, col, body = formulas[-1]
            formulas[-1] = (role, ln, col, body + "\n" + line)
            continue
        stripped = line.strip()
        m = _DECL.match(stripped)
        if m:
            if formulas:
                raise ParseError(lineno, 1, "declarations must precede axioms and the conjecture")
            kind, rest = m.groups()
            for item in _names(rest):
                if kind == "rel":
                    rels.append(item)
                elif kind == "propvar":
                    pvs.append(item)
                elif kind == "indvar":
                    ivs.append(item)
                else:
                    pm = _PRED.match(item)
                    if not pm:
                        raise ParseError(lineno, 1, f"predicate declaration {item!r} must look like name/arity")
                    preds[pm.group(1)] = int(pm.group(2))
            continue
        m = _FORMULA.match(stripped)
        if m:
            role, body = m.groups()
            col = len(raw) - len(raw.lstrip()) + m.start(2) + 1
            formulas.append((role, lineno, col, body))
            continue
        raise ParseError(lineno, 1, f"unrecognized line: {stripped!r}")
    try:
        sig = QmlSignature(ind_vars=ivs, prop_vars=pvs, preds=preds, rels=rels or ["r"])
    except ValueError as e:
        raise ParseError(1, 1, str(e)) from None
    axioms: list[Formula] = []
    conjectures: list[Formula] = []
    for role, ln, col, body in formulas:
        try:
            phi = qml.parse_qml(body, sig)
        except ParseError as e:
            raise ParseError(ln + e.line - 1, e.col + (col - 1 if e.line == 1 else 0), e.message) from None
        (conjectures if role == "conjecture" else axioms).append(phi)
    if len(conjectures) != 1:
        raise ParseError(1, 1, f"expected exactly one conjecture, found {len(conjectures)}")
    return ProblemFile(sig, conjectures[0], tuple(axioms), name)


def render_problem(pf: ProblemFile) -> str:
    sig = pf.signature
    lines = [f"rel {' '.join(sorted(sig.rels))}"]
    if sig.preds:
        lines.append("pred " + " ".join(f"{k}/{n}" for k, n in sorted(sig.preds.items())))
    if sig.prop_vars:
        lines.append(f"propvar {' '.join(sorted(sig.prop_vars))}")
    if sig.ind_vars:
        lines.append(f"indvar {' '.join(sorted(sig.ind_vars))}")
    lines.extend(f"axiom: {qml.print_qml(a)}" for a in pf.axioms)
    lines.append(f"conjecture: {qml.print_qml(pf.conjecture)}")
    return "\n".join(lines) + "\n"


# -- verdicts ----------------------------------------------------------------


@dataclass
class CheckVerdict:
    status: str  # "valid" | "countermodel" | "unknown"
    bound: dict[str, Any]
    models: int = 0
    excluded: int = 0  # models rejected because an axiom fails
    elapsed: float = 0.0
    countermodel: dict[str, Any] | None = None
    reason: str = ""
    _model: kripke.KripkeModel | None = field(default=None, repr=False)

    @property
    def exit_code(self) -> int:
        return {"valid": 0, "countermodel": 1, "unknown": 2}[self.status]

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "status": self.status,
            "bound": self.bound,
            "models": self.models,
            "excluded_by_axioms": self.excluded,
            "elapsed": round(self.elapsed, 3),
        }
        if self.countermodel is not None:
            out["countermodel"] = self.countermodel
        if self.reason:
            out["reason"] = self.reason
        return out

    def render(self) -> str:
        b = ", ".join(f"{k}={v}" for k, v in self.bound.items())
        head = {
            "valid": f"Valid (bounded: {b})",
            "countermodel": "Countermodel",
            "unknown": f"Unknown ({self.reason})",
        }[self.status]
        lines = [head, f"models checked: {self.models}, excluded by axioms: {self.excluded}, time: {self.elapsed:.2f}s"]
        if self._model is not None and self.countermodel is not None:
            lines.append(kripke.describe(self._model))
            g = self.countermodel["assignment"]
            if g["ind"] or g["prop"]:
                lines.append("g = " + json.dumps(g, sort_keys=True))
            lines.append(f"falsified at w{self.countermodel['world']}")
        return "\n".join(lines)


def check_problem(
    pf: ProblemFile,
    max_w: int = 3,
    max_d: int = 2,
    p_mode: str = "powerset",
    *,
    timeout: float | None = None,
    model_limit: int | None = kripke.DEFAULT_MODEL_LIMIT,
) -> CheckVerdict:
    """Search models up to the bounds, smallest first, for one where the axioms hold and the conjecture fails.

    ``Valid`` is relative to the bounds.  A countermodel is re-verified with
    :func:`kripke.satisfies` before it is returned.
    """
    bound = {"max_w": max_w, "max_d": max_d, "p_mode": p_mode}
    start = time.perf_counter()
    verdict = CheckVerdict("valid", bound)
    try:
        for M in kripke.enumerate_models(pf.signature, max_w, max_d, p_mode, limit=model_limit):
            if timeout is not None and time.perf_counter() - start > timeout:
                verdict.status, verdict.reason = "unknown", f"timeout after {verdict.models} models"
                break
            verdict.models += 1
            if not all(kripke.is_valid_in_model(M, a) for a in pf.axioms):
                verdict.excluded += 1
                continue
            hit = kripke.falsifier(M, pf.conjecture)
            if hit is None:
                continue
            g, w = hit
            _reverify(M, g, w, pf)
            verdict.status = "countermodel"
            verdict.countermodel = kripke.countermodel_to_json(M, g, w)
            verdict._model = M
            break
    except ResourceBound as e:
        verdict.status, verdict.reason = "unknown", str(e)
    verdict.elapsed = time.perf_counter() - start
    return verdict


def _reverify(M: kripke.KripkeModel, g: kripke.QmlAssignment, w: int, pf: ProblemFile) -> None:
    # round-trip through the serialized form so the printed payload is what gets checked
    data = json.loads(kripke.dumps_countermodel(M, g, w))
    M2 = kripke.model_from_json(data["model"])
    g2 = kripke.assignment_from_json(data["assignment"])
    if kripke.satisfies(M2, g2, data["world"], pf.conjecture):
        raise InternalError("countermodel does not falsify the conjecture on re-check")
    if not all(kripke.is_valid_in_model(M2, a) for a in pf.axioms):
        raise InternalError("countermodel violates an axiom on re-check")
