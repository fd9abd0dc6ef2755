"""Backend selection for the hot sweep kernel.

The compiled extension is used when it was built; otherwise the pure-Python
implementation is used.  Both return identical arrays.
"""
from . import _sweep_py

try:
    from . import _sweep as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _sweep_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

BACKEND = "compiled" if _compiled is not None else "python"


def get_backend(name=None):
    """Return the module providing ``sweep_abelian`` for ``name`` (default: active)."""
    return BACKENDS[name or BACKEND]


def sweep_abelian(trans, deltas, initial, terminal, max_len, backend=None):
    """Acceptance bitmap, in length-lexicographic order, of every word up to ``max_len``.

    ``trans[state, letter]`` is the target state or -1, ``deltas[state, letter]``
    the integer vector added to the register.  A word is accepted when its run
    exists, ends in a terminal state, and the register is zero.
    """
    return get_backend(backend).sweep_abelian(trans, deltas, initial, terminal, max_len)
