import sys

from dlaguerre.cli import main

sys.exit(main())
