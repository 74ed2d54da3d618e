class CCMError(Exception):
    pass

class InvalidInputError(CCMError):
    pass

class OffManifoldError(CCMError):
    pass

class NumericalRankError(CCMError):
    pass

class DegenerateInputError(CCMError):
    pass

class NotTangentError(CCMError):
    pass

class CertificateViolationError(CCMError):
    pass

class CertificateDegenerateError(CCMError):
    pass

class CertificateFormatError(CCMError):
    pass

class CutLocusError(CCMError):
    pass

class ComponentError(CCMError):
    pass

class InfeasibleReferenceError(CCMError):
    pass

class UnsupportedDegreeError(CCMError, NotImplementedError):
    pass

class ConfigError(CCMError):
    pass
