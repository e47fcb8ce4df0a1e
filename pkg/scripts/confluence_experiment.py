"""Frame-level correspondence between the (i,j,k,l) scheme and confluence.

Default: all four relations distinct, |W| <= 2.  ``--single`` identifies the
four relations with one relation r, which makes |W| = 3 feasible.
"""

import argparse
import time

from qmlstt import corpus


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-w", type=int, default=2)
    ap.add_argument("--single", action="store_true", help="use i = j = k = l = r")
    ap.add_argument("--rels", nargs=4, metavar=("I", "J", "K", "L"), help="explicit relation names")
    args = ap.parse_args()
    rels = tuple(args.rels) if args.rels else ("r",) * 4 if args.single else ("i", "j", "k", "l")
    start = time.perf_counter()
    res = corpus.confluence_correspondence(args.max_w, rels, limit=None)
    print(f"relations={','.join(rels)} max_w={args.max_w} frames={res.frames}")
    print(f"scheme holds in {len(res.scheme_frames)} frames; condition holds in {len(res.condition_frames)}")
    print(f"equal={res.equal} time={time.perf_counter() - start:.2f}s")
    only_scheme = res.scheme_frames - res.condition_frames
    only_cond = res.condition_frames - res.scheme_frames
    if only_scheme or only_cond:
        print(f"scheme-only frames: {len(only_scheme)}, condition-only frames: {len(only_cond)}")
    return 0 if res.equal else 1


if __name__ == "__main__":
    raise SystemExit(main())
