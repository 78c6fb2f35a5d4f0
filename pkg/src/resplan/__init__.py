"""Decision-support engine for traffic incident response planning.

Core pieces: a constrained action catalog, a TOPSIS engine deriving
per-action weights, binary plan extraction/scoring/fusion, a guideline
synthesis pipeline over pluggable generation backends, traffic performance
measures, and an orchestrator exposed through a FastAPI service and a CLI.
"""

__version__ = "0.1.0"
