"""Exception hierarchy shared across the package.

Three branches matter to callers: UsageError (bad invocation / config),
DataError (corpus or input files violate the schema), NumericalError
(non-finite values, shape mismatches, failed gradient checks). The CLI maps
them to exit codes 1 / 2 / 3.
"""


class BotProfilerError(Exception):
    pass


class UsageError(BotProfilerError):
    pass


class DataError(BotProfilerError):
    pass


class NumericalError(BotProfilerError):
    pass


# corpus ingestion / splitting

class MissingField(DataError):
    pass


class DuplicateId(DataError):
    pass


class DanglingReference(DataError):
    pass


class MalformedRow(DataError):
    def __init__(self, line_number, message):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class InsufficientAccounts(DataError):
    pass


# embeddings / language model

class EmptyCorpus(DataError):
    pass


class InconsistentDimension(DataError):
    pass


class UnreadableFile(DataError):
    pass


class EmptySequence(DataError):
    pass


# profiling

class MissingOracleLabels(DataError):
    pass


class UntrainedHeuristic(UsageError):
    pass


class EmptyEstimateList(DataError):
    pass


class MissingProfile(DataError):
    pass


# ensemble training

class SingleClassTrainingSet(DataError):
    pass


class EmptyPartition(DataError):
    pass


# evaluation

class EmptyInput(DataError):
    pass


class UnwritableOutput(DataError):
    pass


class MismatchedTestSets(DataError):
    pass


# synthetic generation / config

class InvalidConfig(UsageError):
    pass


# numerics

class ShapeMismatch(NumericalError):
    pass


class NonFiniteValue(NumericalError):
    pass


class ToleranceExceeded(NumericalError):
    pass
