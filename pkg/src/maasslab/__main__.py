"""Entry point for running the laboratory as a module."""

from maasslab.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
