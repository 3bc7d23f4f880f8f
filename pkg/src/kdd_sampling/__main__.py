"""Allow ``python -m kdd_sampling``."""

from __future__ import annotations

import sys

from .cli import main

sys.exit(main())
