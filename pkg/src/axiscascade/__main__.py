import sys

from axiscascade.cli import main

sys.exit(main())
