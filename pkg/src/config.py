# src/config.py
import logging
import os

# Use these constants; override through function kwargs or CLI flags
DATA_DIR = "data"
REPORT_DIR = "reports"

SIGMA_CAP = 10**6          # max partial selections explored by validate_sigma
EXPANDER_DEGREE = 6        # degree of the sampled undirected regular graphs
EXPANDER_RETRIES = 20
EXPANDER_SAMPLES = 100     # random subsets used to estimate alpha
DEFAULT_ALPHA = 0.0        # target expansion; 0 accepts any connected sample
DEFAULT_SLACK = 2          # extra rounds appended to generated prefixes
FEASIBLE_DRAW_FACTOR = 20  # seeds drawn per requested row by filtered experiments

LOG_FORMAT = "[%(asctime)s] %(levelname)s %(name)s: %(message)s"
LOG_DATEFMT = "%Y-%m-%d %H:%M:%S"


def setup_logging(level=None):
    level = level or os.environ.get("LOG_LEVEL", "INFO")
    logging.basicConfig(level=level, format=LOG_FORMAT, datefmt=LOG_DATEFMT)
