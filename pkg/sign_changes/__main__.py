import sys

from sign_changes.cli import main

sys.exit(main())
