"""Small-cell sleeping with vertical offloading in two-tier cellular networks."""

from .config import (BandAllocation, ConfigError, LoadState, NetworkConfig, QosSpec, RunDefaults,
                     SleepPolicy, load_config)
from .linklayer import interference_factor

__all__ = ["BandAllocation", "ConfigError", "LoadState", "NetworkConfig", "QosSpec", "RunDefaults",
           "SleepPolicy", "interference_factor", "load_config"]
