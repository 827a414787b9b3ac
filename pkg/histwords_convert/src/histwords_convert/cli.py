"""Command-line entry: ``histwords_convert --in <dir> --out <dir> --manifest <path>``.

Exit codes mirror the main toolkit: 0 success, 1 usage error, 2 data or IO
error.  Failures print one ``error: <kind>: <detail>`` line to stderr.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .convert import ConvertError, convert_all


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: usage: {message}", file=sys.stderr)
        raise SystemExit(1)


def main(argv: list[str] | None = None) -> int:
    parser = _Parser(prog="histwords_convert", description=__doc__)
    parser.add_argument("--in", dest="inp", required=True, metavar="DIR",
                        help="directory of <year>-w.npy / <year>-vocab.pkl pairs")
    parser.add_argument("--out", required=True, metavar="DIR",
                        help="directory receiving one <year>.txt per decade")
    parser.add_argument("--manifest", required=True, metavar="PATH",
                        help="series manifest to write")
    args = parser.parse_args(argv)

    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    try:
        summary = convert_all(args.inp, args.out, args.manifest)
    except ConvertError as exc:
        print(f"error: {exc.kind}: {exc.detail}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 2
    print(f"converted {len(summary)} decades", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
