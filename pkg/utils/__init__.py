"""
Utility functions for Tropiscope
"""
