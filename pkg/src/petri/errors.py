"""Exception hierarchy shared by all petri modules."""


class PetriError(Exception):
    """Base class; the CLI maps these to exit code 1."""

    code = "petri_error"

    def to_record(self) -> dict:
        return {"error": self.code, "message": str(self)}


class NoRoot(PetriError):
    code = "no_root"


class UnsupportedExponent(PetriError):
    code = "unsupported_exponent"


class AuditFailed(PetriError):
    code = "audit_failed"

    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count

    def to_record(self) -> dict:
        rec = super().to_record()
        rec["count"] = self.count
        return rec


class CharTwo(PetriError):
    code = "char_two"


class NotHomogeneous(PetriError):
    code = "not_homogeneous"


class Singular(PetriError):
    code = "singular"


class DependentQuadrics(PetriError):
    code = "dependent_quadrics"


class SpecialCase(PetriError):
    code = "special_case"


class SymmetryViolation(PetriError):
    code = "symmetry_violation"


class BadPrime(PetriError):
    code = "bad_prime"


class IdealNotPreserved(PetriError):
    code = "ideal_not_preserved"


class ZeroSpace(PetriError):
    code = "zero_space"


class NotAccepted(PetriError):
    code = "not_accepted"
