import sys

from ccpareto.cli import main

sys.exit(main())
