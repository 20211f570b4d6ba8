class GaussMarkovException(Exception):

    def __init__(self, message, kernel_name=None):
        self.message = message
        self.kernel_name = kernel_name
        super(GaussMarkovException, self).__init__(message)

    def __str__(self):
        s = self.message
        if self.kernel_name:
            s += ' (kernel %s)' % self.kernel_name
        return s

class ConfigException(GaussMarkovException):

    def __init__(self, message, run_name=None, field=None):
        self.run_name = run_name
        self.field = field
        super(ConfigException, self).__init__(message)

    def __str__(self):
        s = self.message
        if self.run_name:
            s += ' (in %s' % self.run_name
            if self.field:
                s += '.%s' % self.field
            s += ')'
        elif self.field:
            s += ' (in %s)' % self.field
        return s

class UsageError(GaussMarkovException):
    pass

class ExpressionException(GaussMarkovException):
    pass

class ExpressionSyntaxError(ExpressionException):

    def __init__(self, message, offset, expected=None):
        self.offset = offset
        self.expected = expected
        super(ExpressionSyntaxError, self).__init__(message)

    def __str__(self):
        s = '%s at byte %d' % (self.message, self.offset)
        if self.expected:
            s += ', expected %s' % self.expected
        return s

class UnknownIdentifier(ExpressionException):

    def __init__(self, name, offset=None):
        self.name = name
        self.offset = offset
        message = 'Unknown identifier: "%s"' % name
        if offset is not None:
            message += ' at byte %d' % offset
        super(UnknownIdentifier, self).__init__(message)

class EvaluationError(ExpressionException):
    pass

class KernelException(GaussMarkovException):
    pass

class AssumptionViolation(KernelException):
    pass

class KernelDegenerate(KernelException):
    pass

class SingularCovariance(KernelException):
    pass

class DivisionByZero(KernelException):
    pass

class HermitianViolation(GaussMarkovException):
    pass

class QuadratureFailure(GaussMarkovException):

    def __init__(self, message, achieved=None, kernel_name=None):
        self.achieved = achieved
        if achieved is not None:
            message += ' (achieved error estimate %.3g)' % achieved
        super(QuadratureFailure, self).__init__(message, kernel_name)

class DegenerateCell(GaussMarkovException):

    def __init__(self, message, index=None, kernel_name=None):
        self.index = index
        super(DegenerateCell, self).__init__(message, kernel_name)

class GridMismatch(GaussMarkovException):
    pass

class GridMissingEndpoints(GaussMarkovException):
    pass
