#!/usr/bin/env python3
"""
Golden Output Generator for the string-orientation CLI

Re-runs every tests/golden/<case>.args invocation and rewrites <case>.out.
Review the diff before committing: the golden files are the reference outputs.

Usage:
    python scripts/generate-golden-files.py [case ...]

Output:
    tests/golden/<case>.out
"""

import shlex
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
GOLDEN_DIR = ROOT / "tests" / "golden"

sys.path.insert(0, str(ROOT))

from string_orientation.cli import EXIT_OK, run  # noqa: E402


def load_argv(args_file: Path) -> list:
    """
    Read one invocation.

    Args:
        args_file: file holding a single command line; {inputs} names tests/golden/inputs

    Returns:
        argv list without the program name
    """
    text = args_file.read_text(encoding="utf-8").strip()
    return shlex.split(text.replace("{inputs}", str(GOLDEN_DIR / "inputs")))


def main():
    """Regenerate the requested golden files, or all of them."""
    wanted = set(sys.argv[1:])
    failures = 0
    for args_file in sorted(GOLDEN_DIR.glob("*.args")):
        case = args_file.stem
        if wanted and case not in wanted:
            continue
        code, output = run(load_argv(args_file))
        if code != EXIT_OK:
            print(f"❌ {case}: exit status {code}, left unchanged")
            failures += 1
            continue
        (GOLDEN_DIR / f"{case}.out").write_text(output, encoding="utf-8")
        print(f"✅ {case}.out written")

    print(f"\nGolden files: {failures} failure(s)")
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
