"""Exception types raised across the package."""


class FlowlandError(Exception):
    pass


class ModelEvaluationError(FlowlandError):
    """Non-finite input reached the vehicle model."""


class IntegrationError(FlowlandError):
    """An integration step produced a non-finite state component."""

    def __init__(self, component, value):
        super().__init__(f"integration produced non-finite {component}={value!r}")
        self.component = component
        self.value = value


class GroundPenetrationError(FlowlandError):
    """A clearance is non-positive: the vehicle is at or below the terrain."""


class ObservationUnavailableError(FlowlandError):
    pass


class EffectivenessUndefinedError(FlowlandError):
    pass


class UndefinedMetricError(FlowlandError):
    pass


class FitError(FlowlandError):
    pass


class TuningError(FlowlandError):
    pass


class ConfigError(FlowlandError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message
