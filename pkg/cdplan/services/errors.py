"""
Exception hierarchy shared by all cdplan services
"""


class CdPlanError(Exception):
    """Base class for cdplan errors"""
    pass


class ArgumentError(CdPlanError):
    """Invalid arguments passed to an operation"""
    pass


class CapacityError(CdPlanError):
    """An enumeration would exceed the configured bound"""

    def __init__(self, message, needed=None, bound=None, cut_size=None):
        super().__init__(message)
        self.needed = needed
        self.bound = bound
        self.cut_size = cut_size

    def to_dict(self):
        return {
            'error': str(self),
            'needed': self.needed,
            'bound': self.bound,
            'cut_size': self.cut_size
        }


class PreconditionError(CdPlanError):
    """Operation precondition violated by otherwise well-formed input"""
    pass


class UnsupportedInputError(CdPlanError):
    """Input outside the supported class (disconnected graphs)"""
    pass


class CertificationError(CdPlanError):
    """Certificate construction or verification failed"""

    def __init__(self, message, tree_edge=None):
        super().__init__(message)
        self.tree_edge = tree_edge


class SchemaError(CdPlanError):
    """Instance file does not follow the JSON schema"""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        location = ''
        if field:
            location += f" at {field}"
        if line:
            location += f" (line {line})"
        super().__init__(f"{message}{location}")
        self.reason = message


class GeneratorError(CdPlanError):
    """Generator could not satisfy its configuration"""
    pass
