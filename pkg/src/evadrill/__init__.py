"""Virtual fire-drill platform: scenario, telemetry, and population tools."""

__version__ = "0.1.0"
