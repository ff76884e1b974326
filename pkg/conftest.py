import os

from hypothesis import HealthCheck, settings

# Solver-backed properties are slow per example; keep counts small outside "thorough"
settings.register_profile("ci", max_examples=25, deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("dev", max_examples=10, deadline=None)
settings.register_profile("thorough", max_examples=200, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "ci"))

os.environ.setdefault("HOTSPOT_ENV", "testing")
