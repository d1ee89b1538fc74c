"""
Log, Arg and ball maps plus rational slope recognition for Tropiscope
"""
