import logging

TRACE = 5
"""Per-curve timings, below DEBUG"""

LOG_FORMAT = "[%(levelname)-8s] %(message)s"


def install_trace_level():
    if logging.getLevelName(TRACE) != "TRACE":
        logging.addLevelName(TRACE, "TRACE")
