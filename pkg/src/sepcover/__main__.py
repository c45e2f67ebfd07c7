import sys

from sepcover.cli import main

sys.exit(main())
