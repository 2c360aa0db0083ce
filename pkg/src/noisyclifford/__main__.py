"""Allow running with `python -m noisyclifford`."""

from .cli import main

main()
