#!/usr/bin/env python3
"""Emit codepoint range tables for the pre-tokenizer character classes.

Writes src/unicode_tables.inc with sorted, merged [lo, hi] ranges for
Unicode letters (L*), numbers (N*), and whitespace (python re \\s).
Run once and commit the output; the Unicode version is recorded in the
generated header.
"""

import re
import sys
import unicodedata


def ranges(predicate):
    out = []
    lo = None
    for cp in range(0x110000):
        if predicate(chr(cp)):
            if lo is None:
                lo = cp
        elif lo is not None:
            out.append((lo, cp - 1))
            lo = None
    if lo is not None:
        out.append((lo, 0x10FFFF))
    return out


def emit(f, name, rs):
    f.write(f"inline constexpr CodepointRange {name}[] = {{\n")
    for i in range(0, len(rs), 4):
        row = ", ".join(f"{{0x{lo:X}, 0x{hi:X}}}" for lo, hi in rs[i : i + 4])
        f.write(f"    {row},\n")
    f.write("};\n\n")


def main(path):
    ws = re.compile(r"\s")
    letters = ranges(lambda c: unicodedata.category(c).startswith("L"))
    numbers = ranges(lambda c: unicodedata.category(c).startswith("N"))
    spaces = ranges(lambda c: ws.match(c) is not None)
    with open(path, "w") as f:
        f.write("// Generated by tools/gen_unicode_tables.py -- do not edit.\n")
        f.write(f"// Unicode {unicodedata.unidata_version}, "
                f"Python {sys.version.split()[0]}.\n\n")
        emit(f, "kLetterRanges", letters)
        emit(f, "kNumberRanges", numbers)
        emit(f, "kSpaceRanges", spaces)
    print(f"wrote {path}: {len(letters)} letter, {len(numbers)} number, "
          f"{len(spaces)} space ranges")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/unicode_tables.inc")
