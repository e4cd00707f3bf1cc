import sys

from macroabm.cli import main

sys.exit(main())
