"""Process semantics of star expressions as finite process graphs.

Submodules: syntax (expressions), semantics (rule systems and
interpretations), charts (the graph model and serialization), bisim
(bisimilarity and collapse), lee (loop elimination and witnesses),
cli (front end and theorem verifiers).
"""

from .syntax import parse_star_expr, render  # noqa: F401
from .semantics import chart_of, labeled_onechart_of, onechart_of  # noqa: F401
