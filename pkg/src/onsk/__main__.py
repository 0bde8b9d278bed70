"""Module entry point so `python -m onsk` matches the installed script."""

from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())
