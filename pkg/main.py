import sys

from conditional_parity.runner import run


if __name__ == "__main__":
    sys.exit(run())
