"""
Expression parsing, evaluation and formal series for Tropiscope
"""
