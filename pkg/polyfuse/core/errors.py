from __future__ import annotations
from dataclasses import dataclass
from enum import IntEnum
from typing import List, Optional, Union


def format_str(astr, *args):
    return astr.format(*args)


class StatusType(IntEnum):
    VALIDATION = 1
    PROCESSING = 2
    IO = 3
    UNKNOWN = 4


# Status codes for every failure the toolkit can report.
#
# The numeric range of a code decides its `StatusType`:
# 1000-1999 are configuration / precondition problems, 2000-2999 are
# failures while computing, 3000-3999 are file and format problems.
class StatusCode(IntEnum):
    # validation
    INVALID_CONFIG = 1001
    MISSING_INPUT = 1002
    CALIBRATION_MISMATCH = 1003
    NON_ORTHONORMAL_ROTATION = 1004
    INVALID_THRESHOLD = 1005
    INVALID_RANGE = 1006
    INVALID_PARAMETER = 1007
    INVALID_CLASS_TABLE = 1008
    UNKNOWN_CLASS_ID = 1009
    INVALID_INTRINSICS = 1010

    # processing
    NON_POSITIVE_DEPTH = 2001
    DEGENERATE_ROTATION = 2002
    DEGENERATE_BASELINE = 2003
    DIMENSION_MISMATCH = 2004
    ODD_DIMENSIONS = 2005
    TOTAL_INTERNAL_REFLECTION = 2006
    ZERO_REFLECTANCE = 2007
    THETA_OUT_OF_FOV = 2008
    OUTSIDE_ANNULUS = 2009
    BEHIND_CAMERA = 2010
    OUT_OF_BOUNDS = 2011
    EMPTY_SCENE = 2012

    # io
    IO_ERROR = 3001
    BAD_IMAGE = 3002
    BAD_MAGIC = 3003
    MALFORMED_TABLE = 3004

    def status_type(self) -> StatusType:
        if 1000 <= self < 2000:
            return StatusType.VALIDATION
        if 2000 <= self < 3000:
            return StatusType.PROCESSING
        if 3000 <= self < 4000:
            return StatusType.IO
        return StatusType.UNKNOWN


@dataclass
class Status:
    code: StatusCode
    message: Optional[str] = None

    def with_message(self, message: str) -> Status:
        self.message = message
        return self

    def status_type(self) -> StatusType:
        return self.code.status_type()

    def __str__(self):
        if self.message:
            return f"{self.code.name}: {self.message}"
        return self.code.name


class PolyfuseException(Exception):

    def __init__(self, status: Union[Status, List[Status]]):
        if isinstance(status, Status):
            self.statuses = [status]
        else:
            self.statuses = list(status)
        # pipeline stage that raised, filled in by the stage runner
        self.stage: Optional[str] = None
        super().__init__("; ".join(str(x) for x in self.statuses))

    def __str__(self):
        text = "; ".join(str(x) for x in self.statuses)
        return f"[{self.stage}] {text}" if self.stage else text

    @property
    def status(self) -> Status:
        return self.statuses[0]

    @property
    def code(self) -> StatusCode:
        return self.statuses[0].code

    @classmethod
    def of(cls, code: StatusCode, fmt: str = None, *args) -> PolyfuseException:
        status = Status(code)
        if fmt is not None:
            status.with_message(format_str(fmt, *args))
        return cls(status)


def bail(code: StatusCode, fmt: str = None, *args):
    raise PolyfuseException.of(code, fmt, *args)


def ensure(cond, code: StatusCode, fmt: str = None, *args):
    if not cond:
        bail(code, fmt, *args)
