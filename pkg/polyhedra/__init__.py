"""
Exact rational polyhedra, normal fans and spherical complexes for Tropiscope
"""
