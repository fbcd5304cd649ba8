"""
wassreg - Wasserstein Regression Package
Transfer-operator identification from unpaired distributional snapshots
"""

__version__ = "0.1.0"
