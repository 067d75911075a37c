"""Exception hierarchy shared by the library and the CLI."""


class DomainError(ValueError):
    """An input lies outside the region where the model is defined."""


class NoiseFloorError(DomainError):
    """An observed error rate sits below the IM noise floor p = 2/(r+3)."""

    def __init__(self, value: float, floor: float, what: str = "QBER"):
        self.value = value
        self.floor = floor
        super().__init__(
            f"{what} {value:.12g} is below the intensity-modulator noise floor "
            f"p = {floor:.12g}"
        )


class NoRootError(DomainError):
    """A rate has no sign change inside the search bracket."""


class NotPositiveAtOriginError(DomainError):
    """The key rate is not positive at zero distance, so no max distance exists."""


class CutoffTooSmallError(DomainError):
    """The Fock cutoff discards more probability than the allowed tail bound."""
