"""Status codes shared by the integration kernels."""

OK = 0
BARRIER_ABORT = 1
LOG_FULL = 2
STEP_BUDGET = 3
