import sys

from steen_lab.cli import main

sys.exit(main())
