"""
Amoeba and coamoeba figures for Tropiscope
"""
