"""
Typed records for domains, fields, Young pairs, bounds and experiments.
"""
