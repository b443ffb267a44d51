import sys

from src.cli import run


def main():
    """
    Entry point for the prime-sequence toolkit.
    All work is delegated to the command-line interface in src/cli.py.
    """
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
