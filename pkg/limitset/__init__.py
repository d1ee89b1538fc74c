"""
Logarithmic limit set estimation and algebraicity verdicts for Tropiscope
"""
