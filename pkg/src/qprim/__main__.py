import sys

from qprim.cli import main

sys.exit(main())
