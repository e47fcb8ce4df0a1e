"""Regenerate the THF golden files under tests/golden/ and the .p files under problems/."""

import argparse
from pathlib import Path

from qmlstt import corpus
from qmlstt.thf import emit_operator_axioms

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=ROOT / "tests" / "golden")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, problem in corpus.builtin_problems().items():
        (args.out / f"{name}.p").write_text(problem.render(), encoding="utf-8")
        print(f"wrote {args.out / name}.p")
    ops = args.out / "operators.p"
    ops.write_text(emit_operator_axioms(include_hybrid=True).render(), encoding="utf-8")
    print(f"wrote {ops}")


if __name__ == "__main__":
    main()
