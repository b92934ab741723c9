__package__ = "simulation"
