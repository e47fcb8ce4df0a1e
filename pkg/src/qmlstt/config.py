"""Run configurations for bounded checks and oracle suites."""

from __future__ import annotations

from dataclasses import dataclass

from . import corpus, kripke, oracle
from .check import CheckVerdict, ProblemFile, check_problem
from .oracle import OracleReport


@dataclass(frozen=True)
class SearchBounds:
    max_w: int = 3
    max_d: int = 2
    p_mode: str = "powerset"
    timeout: float | None = None
    model_limit: int | None = kripke.DEFAULT_MODEL_LIMIT

    def __post_init__(self) -> None:
        if self.max_w < 1 or self.max_d < 1:
            raise ValueError("bounds must be at least 1")
        if self.p_mode not in ("powerset", "all"):
            raise ValueError(f"unknown p_mode {self.p_mode!r}")

    def check(self, pf: ProblemFile) -> CheckVerdict:
        return check_problem(
            pf, self.max_w, self.max_d, self.p_mode, timeout=self.timeout, model_limit=self.model_limit
        )


# per-suite defaults for (max_w, max_d)
SUITE_DEFAULTS = {"lemma1": (2, 1), "transfer": (3, 2), "lemma3": (3, 1)}


@dataclass(frozen=True)
class OracleConfig:
    suite: str
    max_w: int | None = None
    max_d: int | None = None
    depth: int = 3
    max_formulas: int | None = None

    def __post_init__(self) -> None:
        if self.suite not in SUITE_DEFAULTS:
            raise ValueError(f"unknown suite {self.suite!r}")

    @property
    def bounds(self) -> tuple[int, int]:
        w, d = SUITE_DEFAULTS[self.suite]
        return self.max_w or w, self.max_d or d

    def run(self, pf: ProblemFile | None = None) -> OracleReport:
        """Run the suite; ``pf`` supplies the signature (lemma1) or the formula (transfer)."""
        max_w, max_d = self.bounds
        if self.suite == "lemma1":
            sig = pf.signature if pf is not None else oracle.LEMMA3_SIGNATURE
            return oracle.check_lemma1(sig, max_w, max_d, self.depth, max_formulas=self.max_formulas)
        if self.suite == "transfer":
            if pf is None:
                b = corpus.EXISTS_TRUTH
                return oracle.check_validity_transfer(b.formula(), b.signature, max_w, max_d)
            return oracle.check_validity_transfer(pf.conjecture, pf.signature, max_w, max_d)
        return oracle.check_lemma3(max_w, max_d)
