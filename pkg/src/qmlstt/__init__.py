"""Quantified multimodal logic embedded in simple type theory.

Modules:

* :mod:`qmlstt.stt` -- simply typed lambda calculus kernel
* :mod:`qmlstt.qml` -- QML syntax, parser and printer
* :mod:`qmlstt.embedding` -- modal operators as lambda terms and the translation
* :mod:`qmlstt.kripke` -- Kripke semantics, model classification, enumeration
* :mod:`qmlstt.henkin` -- evaluation in finite standard frames
* :mod:`qmlstt.oracle` -- exhaustive cross-checks of the two semantics
* :mod:`qmlstt.thf` -- TPTP THF emission, parsing, prover runner
* :mod:`qmlstt.cli` -- command line interface
"""

__version__ = "0.1.0"
