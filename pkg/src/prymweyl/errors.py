"""Exception hierarchy shared by all modules."""


class PrymWeylError(Exception):
    """Base class for every error raised by the package."""


class RootSystemError(PrymWeylError, ValueError):
    """Invalid Cartan type or weight."""


class BoundExceeded(PrymWeylError):
    """A configured resource bound (orbit size, weight count) was exceeded."""

    def __init__(self, what, bound):
        super().__init__(f"{what} exceeds the configured bound {bound}")
        self.what = what
        self.bound = bound


class LatticeError(PrymWeylError, ValueError):
    """Degenerate form, non-integral endomorphism or failed divisibility."""


class CoverError(PrymWeylError):
    """Malformed monodromy data or exhausted cover search."""


class HomologyError(PrymWeylError):
    """A construction-time invariant of a homology model failed."""

    def __init__(self, check, detail=""):
        msg = f"homology invariant '{check}' failed"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.check = check
