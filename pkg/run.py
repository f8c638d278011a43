#!/usr/bin/env python3
"""Script entry point.

`src/main.py` uses package-relative imports, so it cannot be executed as a
file. Importing `src.main` from the repo root keeps `src` a real package;
`python3 -m src.main` works just as well.
"""

import sys

from src.main import main

if __name__ == "__main__":
    sys.exit(main())
