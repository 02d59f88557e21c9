"""Regenerate the bundled JSON corpus from rbforge.corpus."""

from pathlib import Path

from rbforge import io
from rbforge.corpus import corpus_algebras, corpus_systems

OUT = Path(__file__).resolve().parents[1] / "src" / "rbforge" / "corpus"


def main():
    (OUT / "algebras").mkdir(parents=True, exist_ok=True)
    for name, A in corpus_algebras().items():
        io.save_algebra(A, OUT / "algebras" / f"{name}.json")
    for name, sys in corpus_systems().items():
        assert sys.is_valid, name
        io.save_system(sys, OUT / f"{name}.json", name=name)
    print(f"wrote corpus to {OUT}")


if __name__ == "__main__":
    main()
