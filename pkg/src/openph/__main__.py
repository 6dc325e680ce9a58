import sys

from openph.cli import main

if __name__ == "__main__":
    sys.exit(main())
