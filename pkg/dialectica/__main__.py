"""Entry point for ``python -m dialectica``."""

from .cli import main

raise SystemExit(main())
