"""Record exhaustive classification counts as regression fixtures.

The counts come from the enumeration itself; re-run this script (and review
the diff) whenever the classification logic changes on purpose.
"""

import argparse
import json
from pathlib import Path

from rbforge import __version__
from rbforge.corpus import corpus_algebras
from rbforge.search import SearchSpec, classify

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "search_counts.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--output", type=Path, default=DEFAULT_OUT)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    entries = {}
    for name, A in sorted(corpus_algebras().items()):
        if not A.field.is_finite:
            continue
        rep = classify(SearchSpec(A), workers=args.workers)
        entries[name] = {
            "examined": rep.examined,
            "counts": rep.counts,
            "flag_totals": rep.flag_totals,
            "witnesses": {k: v["index"] for k, v in rep.witnesses.items()},
        }
        print(f"{name:10s} valid={rep.flag_totals['validSystem']:5d} of {rep.examined}")
    doc = {"provenance": f"derived by rbforge {__version__} exhaustive classify", "algebras": entries}
    args.output.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
