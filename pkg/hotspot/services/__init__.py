"""
Geometry, Young pairs, norms, PDE solvers and closed-form bounds.
"""
