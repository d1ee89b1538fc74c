"""
Shell sampling of torus varieties for Tropiscope
"""
