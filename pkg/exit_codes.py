"""
Exit codes for the FairPath command line.

    0: success, no discrimination found
    1: error (bad input, parse failure, invalid query)
    2: discrimination found
    3: indirect effect indeterminate and no direct discrimination
    4: the repair quadratic program could not be solved
"""


class ExitCodes:
    """Standard exit codes for FairPath commands."""

    SUCCESS = 0
    ERROR = 1
    DISCRIMINATION = 2
    INDETERMINATE = 3
    SOLVER_FAILURE = 4

    @classmethod
    def get_description(cls, code: int) -> str:
        """Human-readable description of an exit code."""
        descriptions = {
            cls.SUCCESS: "Success - no discrimination found",
            cls.ERROR: "Error - input could not be processed",
            cls.DISCRIMINATION: "Discrimination found",
            cls.INDETERMINATE: "Indirect effect indeterminate (recanting witness present)",
            cls.SOLVER_FAILURE: "Repair quadratic program could not be solved",
        }
        return descriptions.get(code, f"Unknown exit code: {code}")

    @classmethod
    def for_report(cls, report) -> int:
        """Exit code for a discovery report; direct discrimination wins over indeterminate."""
        if report.discrimination_found:
            return cls.DISCRIMINATION
        if report.indeterminate:
            return cls.INDETERMINATE
        return cls.SUCCESS
