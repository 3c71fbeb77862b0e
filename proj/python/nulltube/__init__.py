from ._nulltube import *  # noqa: F401,F403
from ._nulltube import __doc__  # noqa: F401
