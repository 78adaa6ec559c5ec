"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the command line
front end can report it as structured JSON.
"""


class WallcrossError(ValueError):
    code = "error"

    def __init__(self, detail="", location=None):
        super().__init__(detail)
        self.detail = detail
        self.location = location

    def as_dict(self):
        return {"error": self.code, "detail": self.detail, "location": self.location}


def _make(name, code, doc):
    return type(name, (WallcrossError,), {"code": code, "__doc__": doc})


NotSkewSymmetric = _make("NotSkewSymmetric", "not_skew_symmetric", "Gram matrix is not skew-symmetric.")
ConeMismatch = _make("ConeMismatch", "cone_mismatch", "Operands live over different cones or lattices.")
SupportOutsideCone = _make("SupportOutsideCone", "support_outside_cone", "A series key lies outside its truncation cone.")
BadCone = _make("BadCone", "bad_cone", "Cone generators or height functional are invalid.")
NonzeroConstantTerm = _make("NonzeroConstantTerm", "nonzero_constant_term", "A Lie series was given a constant term.")
DegenerateForm = _make("DegenerateForm", "degenerate_form", "The skew form is singular where faithfulness is required.")
InconsistentAction = _make("InconsistentAction", "inconsistent_action", "Input action is not a Hamiltonian automorphism.")
BadLattice = _make("BadLattice", "bad_lattice", "Lattice does not carry the expected form.")
ZeroVector = _make("ZeroVector", "zero_vector", "The zero lattice vector is not allowed here.")
NotPrimitive = _make("NotPrimitive", "not_primitive", "Lattice vector is not primitive.")
DegenerateCharge = _make("DegenerateCharge", "degenerate_charge", "Two distinct rays share a central charge argument.")
SectorTooWide = _make("SectorTooWide", "sector_too_wide", "Central charges do not fit in a strict sector.")
OrderingViolated = _make("OrderingViolated", "ordering_violated", "Ray factors are not strictly clockwise.")
NonUnitConstantTerm = _make("NonUnitConstantTerm", "non_unit_constant_term", "Series is not invertible.")
PoleAtMinusOne = _make("PoleAtMinusOne", "pole_at_minus_one", "Coefficient has a pole at q^(1/2) = -1.")
NotDivisible = _make("NotDivisible", "not_divisible", "Exact polynomial division failed.")
NotHomogeneous = _make("NotHomogeneous", "not_homogeneous", "Polynomial is not homogeneous.")
ZeroCharge = _make("ZeroCharge", "zero_charge", "Central charge vanishes on a support vector.")
SectorNotStrict = _make("SectorNotStrict", "sector_not_strict", "Sector has angular width of at least pi.")
NonGenericPath = _make("NonGenericPath", "non_generic_path", "Path meets a non-generic wall configuration.")
