"""
Thetaflex - wiersz poleceń. Przykład:

    python cli.py theta-eval --omega omega.json --z 0
"""
from modules.io_cli import main

if __name__ == "__main__":
    raise SystemExit(main())
