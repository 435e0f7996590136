import sys

from baptista.cli import main

sys.exit(main())
