"""
Hot-spot distance bounds: solvers, geometry and certification.
"""

__version__ = "0.1.0"
