__package__ = "preprocessing"
