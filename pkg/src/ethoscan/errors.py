"""Exception hierarchy shared across the package."""


class EthoscanError(Exception):
    """Base class for all errors raised by this package."""


# --- fact model ---

class UnknownRepoError(EthoscanError):
    def __init__(self, full_name: str):
        super().__init__(f"unknown repository: {full_name!r}")
        self.full_name = full_name


class FactValidationError(EthoscanError):
    """A record violates a structural invariant of the fact model."""


# --- snapshots ---

class SnapshotSchemaError(EthoscanError):
    """Snapshot JSON does not match the documented schema."""

    def __init__(self, field: str, message: str):
        super().__init__(f"snapshot field {field!r}: {message}")
        self.field = field


class SnapshotVersionError(EthoscanError):
    def __init__(self, found, expected: int):
        super().__init__(f"unsupported snapshot formatVersion {found!r} (expected {expected})")
        self.found = found
        self.expected = expected


# --- live fetching ---

class BudgetExhaustedError(EthoscanError):
    def __init__(self, used: int, cap: int):
        super().__init__(f"request budget exhausted: {used} of {cap} requests used")
        self.used = used
        self.cap = cap


class AuthenticationError(EthoscanError):
    pass


class RateLimitError(EthoscanError):
    pass


class RepositoryNotFoundError(EthoscanError):
    def __init__(self, full_name: str):
        super().__init__(f"repository not found: {full_name}")
        self.full_name = full_name


class PartialFetchError(EthoscanError):
    def __init__(self, missing: list[str]):
        super().__init__("fetch incomplete; missing facts: " + ", ".join(missing))
        self.missing = missing


class DisallowedHostError(EthoscanError):
    def __init__(self, url: str):
        super().__init__(f"host not on external-page allowlist: {url}")
        self.url = url


# --- rule language ---

class RuleParseError(EthoscanError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"parse error at {line}:{column}: {message}")
        self.line = line
        self.column = column


class UnsafeVariableError(EthoscanError):
    def __init__(self, variable: str, rule_text: str):
        super().__init__(
            f"unsafe variable {variable!r} in rule {rule_text!r}: "
            "must occur in a positive body atom"
        )
        self.variable = variable


class StratificationError(EthoscanError):
    def __init__(self, cycle: list[str]):
        super().__init__("negation cycle through: " + " -> ".join(cycle))
        self.cycle = cycle


class DuplicateRuleError(EthoscanError):
    pass


class UnknownPredicateError(EthoscanError):
    def __init__(self, predicate: str):
        super().__init__(f"predicate {predicate!r} is neither a base fact, a rule head, nor a builtin")
        self.predicate = predicate


class BuiltinTypeError(EthoscanError):
    """A builtin predicate received an argument of the wrong type."""


class FuelExhaustedError(EthoscanError):
    """Internal safety bound tripped; indicates a bug, not a user error."""


# --- similarity ---

class EmptyNeedleError(EthoscanError):
    pass


class GramSizeMismatchError(EthoscanError):
    def __init__(self, k_needle: int, k_hay: int):
        super().__init__(f"fingerprint gram sizes differ: {k_needle} vs {k_hay}")


class IncompleteTreeError(EthoscanError):
    def __init__(self, full_name: str, detail: str):
        super().__init__(f"repository {full_name} lacks a complete source tree: {detail}")
        self.full_name = full_name


# --- license analysis ---

class MissingDiffError(EthoscanError):
    def __init__(self, sha: str):
        super().__init__(f"commit {sha} has no code-change text")
        self.sha = sha


# --- fixtures ---

class MissingFixtureError(EthoscanError):
    def __init__(self, path: str):
        super().__init__(f"fixture file not found: {path}")
        self.path = path
