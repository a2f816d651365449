"""Shared output helper: files land in ``demos/output`` unless a path is given."""
import pathlib
import sys


def out_dir():
    d = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path(__file__).parent / "output"
    d.mkdir(parents=True, exist_ok=True)
    return d
