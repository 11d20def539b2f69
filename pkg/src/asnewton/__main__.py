import sys

from asnewton.cli import main

sys.exit(main())
