"""Conversational recommendation engine for grounded force feedback
haptic devices."""

__version__ = "0.1.0"
