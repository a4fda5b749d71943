from polyfuse.core.errors import (
    StatusCode, StatusType, Status, PolyfuseException, ensure, bail, format_str
)
from polyfuse.core.json_printable import JsonPrintable
