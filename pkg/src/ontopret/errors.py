"""Exception hierarchy shared by every ontopret module."""


class OntoPretError(Exception):
    pass


class UnknownPrefix(OntoPretError):
    def __init__(self, prefix, line=None, column=None):
        self.prefix = prefix
        self.line = line
        self.column = column
        where = f" at {line}:{column}" if line is not None else ""
        super().__init__(f"undeclared prefix {prefix!r}{where}")


class FragmentError(OntoPretError):
    """An axiom or construct lies outside the supported description-logic fragment."""


class ParseError(OntoPretError):
    def __init__(self, line, column, message, expected=None):
        self.line = line
        self.column = column
        self.message = message
        self.expected = expected
        text = f"{line}:{column}: {message}"
        if expected:
            text += f" (expected {expected})"
        super().__init__(text)


class UnsupportedConstruct(ParseError):
    """Valid Turtle that falls outside the accepted subset."""


class NotEntailed(OntoPretError):
    pass


class UnknownActor(OntoPretError):
    pass


class NotADeviation(OntoPretError):
    pass


class TraceError(OntoPretError):
    """Malformed trace file or event stream."""


class InvariantBreach(OntoPretError):
    pass


class UnboundFilterVariable(OntoPretError):
    pass


class NonNumericValue(OntoPretError):
    pass


class BrokenSequence(OntoPretError):
    pass


class MissingScenarioData(OntoPretError):
    def __init__(self, missing):
        self.missing = tuple(missing)
        super().__init__("missing scenario individuals: " + ", ".join(str(m) for m in self.missing))
