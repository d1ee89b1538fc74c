"""
Phase limit sets for Tropiscope
"""
