"""Kinematic 2.5D desk simulator."""
