"""noisyclifford — Scrambling and nonlocal magic of noisy Clifford encoding-decoding circuits."""

__version__ = "0.1.0"
