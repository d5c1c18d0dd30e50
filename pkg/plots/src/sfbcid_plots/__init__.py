"""Figure rendering for sfbcid CSV bundles.

Consumes the summary / histogram tables written by the ``sfbcid simulate``
harness and turns each preset's bundle into a single static figure.  The
package never imports sfbcid itself: CSV files are the only interface.
"""

from .figures import PRESETS, FigureSpec, render, resolve_preset

__all__ = ["PRESETS", "FigureSpec", "render", "resolve_preset"]
