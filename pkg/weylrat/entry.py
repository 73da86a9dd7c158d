# Do not reorder imports
from .main import *  # NOQA: F403
