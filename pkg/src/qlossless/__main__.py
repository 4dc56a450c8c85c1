import sys

from qlossless.cli import main

sys.exit(main())
