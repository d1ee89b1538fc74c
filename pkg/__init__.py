"""
Tropiscope - logarithmic limit sets, coamoebas and algebraicity checks
"""

__version__ = "0.1.0"
__author__ = "Tropiscope Team"
__description__ = "Numerical logarithmic limit sets and algebraicity verdicts for varieties in the complex torus"
