"""
Experiment orchestration, property checks and report emission.
"""
