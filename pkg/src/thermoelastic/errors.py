"""Exception types raised by the analysis pipeline."""


class ThermoelasticError(Exception):
    """Base class for all package errors."""


class DegenerateDirection(ThermoelasticError):
    """A(eta) has a double eigenvalue at the requested angle."""

    def __init__(self, phi, discriminant):
        self.phi = float(phi)
        self.discriminant = float(discriminant)
        super().__init__(
            f"degenerate direction phi={self.phi:.12g} "
            f"(discriminant {self.discriminant:.3e})"
        )


class NonConvergent(ThermoelasticError):
    """Richardson tableau did not settle to the requested tolerance."""


class RootFindingFailure(ThermoelasticError):
    pass


class OrderAmbiguous(ThermoelasticError):
    """A vanishing or tangency order could not be decided cleanly."""


class AssumptionViolated(ThermoelasticError):
    def __init__(self, assumption, detail=""):
        self.assumption = assumption
        self.detail = detail
        msg = f"assumption {assumption} violated"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class UnstableStep(ThermoelasticError):
    pass


class InsufficientData(ThermoelasticError):
    pass
