"""Exception types shared across the package."""


class PictobridgeError(Exception):
    """Base class for all package errors."""


class UnknownConcept(PictobridgeError):
    pass


class UnknownLanguage(PictobridgeError):
    pass


class UnknownTerm(PictobridgeError):
    pass


class UnmappableEvent(PictobridgeError):
    pass


class MissingTemplate(PictobridgeError):
    pass


class IllegalValue(PictobridgeError):
    pass


class UnknownMessage(PictobridgeError):
    pass


class StaleEvent(PictobridgeError):
    pass


class UnknownToken(PictobridgeError):
    pass


class MalformedTopic(PictobridgeError):
    pass


class UnknownScenario(PictobridgeError):
    pass


class InvalidTarget(PictobridgeError):
    pass


class UnknownStation(PictobridgeError):
    pass


class UnknownKind(PictobridgeError):
    pass


class ScriptError(PictobridgeError):
    """Raised when a scenario script line cannot be parsed."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
