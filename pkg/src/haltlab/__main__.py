"""Allow `python -m haltlab`."""

from haltlab.cli import main

raise SystemExit(main())
