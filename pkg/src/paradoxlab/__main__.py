import sys

from paradoxlab.cli import main

sys.exit(main())
