from ._shootout import *  # noqa: F401,F403
