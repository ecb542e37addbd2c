import sys

from kserial.cli import main

sys.exit(main())
