"""Exception hierarchy shared by all modules.

Every error carries a short machine-readable ``code`` so the CLI can report
it without string matching.
"""


class IsoparamError(Exception):
    code = "error"


class InvalidInput(IsoparamError):
    code = "invalid-input"


class ParseError(InvalidInput):
    code = "parse-error"

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = " (line %d, column %d)" % (line, column or 0)
        super().__init__(message + where)
        self.line = line
        self.column = column


class InvalidHyperplane(InvalidInput):
    code = "invalid-hyperplane"


class PreconditionError(InvalidInput):
    code = "precondition"


class DegenerateConfiguration(InvalidInput):
    code = "degenerate-configuration"


class InvalidFamily(InvalidInput):
    code = "invalid-family"


class InvalidRoot(InvalidInput):
    code = "invalid-root"


class InvalidPair(InvalidInput):
    code = "invalid-pair"


class NotSpanned(InvalidInput):
    code = "not-spanned"


class Unsupported(InvalidInput):
    code = "unsupported"


class OnWall(InvalidInput):
    code = "on-wall"


class WindowExhausted(IsoparamError):
    code = "window-exhausted"


class InvarianceError(InvalidInput):
    code = "invariance"


class CircleRuleError(InvalidInput):
    code = "circle-rule"


class UnclassifiedDiagram(IsoparamError):
    code = "unclassified-diagram"


class UndefinedRatio(InvalidInput):
    code = "undefined-ratio"


class FocalBasepoint(InvalidInput):
    code = "basepoint-on-focal-hyperplane"


class FocalTranslation(InvalidInput):
    code = "focal-translation"


class DivergentSum(InvalidInput):
    code = "divergent-sum"


class MixedArgument(InvalidInput):
    code = "mixed-argument"


class ModelInconsistency(IsoparamError):
    code = "model-inconsistency"


class DegeneratePoint(IsoparamError):
    code = "degenerate-point"


class NotInitialized(IsoparamError):
    code = "not-initialized"


class HypothesisViolation(InvalidInput):
    code = "hypothesis-violation"


class UnknownModel(InvalidInput):
    code = "unknown-model"
