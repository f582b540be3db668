import sys

from ppclab.expcli.cli import main

sys.exit(main())
