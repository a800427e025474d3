import sys

from f3dc.main import main

sys.exit(main())
