import sys

from boundkey.cli import main

sys.exit(main())
