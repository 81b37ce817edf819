"""Exception types shared across the package."""


class GLCError(Exception):
    """Base class for every error raised by this package."""


class NotFound(GLCError, KeyError):
    pass


class InvalidGraph(GLCError, ValueError):
    pass


class InvalidSeparation(GLCError, ValueError):
    pass


class InvalidPartition(GLCError, ValueError):
    pass


class OddCutPresent(GLCError):
    def __init__(self, vertices):
        self.vertices = tuple(vertices)
        super().__init__(f"odd-degree vertices present: {', '.join(map(str, self.vertices))}")


class InvalidSystem(GLCError, ValueError):
    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class InvalidInput(GLCError, ValueError):
    pass


class InvalidThread(GLCError, ValueError):
    pass


class InvalidSpec(GLCError, ValueError):
    pass


class WouldCreateLoop(GLCError, ValueError):
    pass


class TooLarge(GLCError):
    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)


class NoOddCut(GLCError):
    pass


class PreconditionViolated(GLCError):
    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class SubdivideFirst(GLCError, ValueError):
    pass


class ConstructionInvariantViolated(GLCError):
    def __init__(self, step, check, detail):
        self.step = step
        self.check = check
        self.detail = detail
        super().__init__(f"step {step}: {check} failed ({detail})")
