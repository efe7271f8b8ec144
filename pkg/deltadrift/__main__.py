import sys

from deltadrift.cli import main

sys.exit(main())
