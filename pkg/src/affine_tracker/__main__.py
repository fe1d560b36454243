"""Allow ``python -m affine_tracker``."""

import sys

from affine_tracker.cli import main

sys.exit(main())
