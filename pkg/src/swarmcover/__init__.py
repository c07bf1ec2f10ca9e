"""Multi-agent actor-critic area coverage for point swarms over polygonal regions."""

__version__ = "0.1.0"
