import sys

from lilbands.cli.main import main

sys.exit(main())
