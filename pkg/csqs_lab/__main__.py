#!/usr/bin/env python3
"""
csqs-lab entry point.

Invoked by the `csqs-lab` console script and by `python -m csqs_lab`.
"""


def main():
    """Run the typer application."""
    from csqs_lab.cli.main import app

    app()


if __name__ == "__main__":
    main()
