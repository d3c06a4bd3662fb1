class ConfigurationError(ValueError):
    """Invalid configuration: unknown names, bad parameter values, mismatched plans."""


class MissingCellsError(ConfigurationError):
    """A report grouping needs cells the result store does not contain."""

    def __init__(self, missing):
        self.missing = sorted(missing)
        listing = ", ".join(f"{v}:{f}" for v, f in self.missing)
        super().__init__(f"store is missing {len(self.missing)} cell(s): {listing}")
