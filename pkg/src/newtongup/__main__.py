import sys

from newtongup.cli import main

sys.exit(main())
