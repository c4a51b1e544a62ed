"""Convert the 20news-bydate release into the alt-vs-comp directory corpus.

    python3 scripts/prepare_alt_comp.py 20news-bydate-train 20news-bydate-test data/alt-comp

writes ``data/alt-comp/{train,test}/{alt,comp}/<group>-<id>.txt`` as UTF-8.
Every ``alt.*`` group becomes class ``alt`` and every ``comp.*`` group class
``comp``. The original files are Latin-1.
"""

import argparse
from pathlib import Path

PREFIXES = ("alt", "comp")


def convert(src: Path, dst: Path) -> int:
    n = 0
    for group in sorted(p for p in src.iterdir() if p.is_dir()):
        label = group.name.split(".")[0]
        if label not in PREFIXES:
            continue
        out = dst / label
        out.mkdir(parents=True, exist_ok=True)
        for f in sorted(group.iterdir()):
            text = f.read_bytes().decode("latin-1")
            (out / f"{group.name}-{f.name}.txt").write_text(text, encoding="utf-8")
            n += 1
    return n


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("train", type=Path)
    parser.add_argument("test", type=Path)
    parser.add_argument("out", type=Path)
    args = parser.parse_args()
    for split, src in (("train", args.train), ("test", args.test)):
        print(f"{split}: {convert(src, args.out / split)} documents")


if __name__ == "__main__":
    main()
