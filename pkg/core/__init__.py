"""
Core components for Tropiscope
"""
