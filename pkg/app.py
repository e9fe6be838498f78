"""
Discrete Catenoids
A command-line tool that builds semi-discrete and discrete minimal surfaces,
verifies their defining properties and compares the catenoid families.

Usage:
    python app.py gen bp --c1 0.8813735870195430 --c2 1.0471975511965976 --n-min -2 --n-max 2 --out cat.obj
    python app.py gen mw-ps-rd --alpha 0.5235987755982988 --out cat.csv --format surface
    python app.py verify cat.csv --checks conjugate,circular
    python app.py compare --suite theorem1
"""

from cli_io import cli_main

if __name__ == '__main__':
    raise SystemExit(cli_main())
