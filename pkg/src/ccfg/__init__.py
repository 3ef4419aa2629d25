"""ccfg: planar contact-configuration simulation, estimation, and control."""

__version__ = "0.1.0"
