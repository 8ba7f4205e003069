import csv
import json
import logging
from typing import TextIO

import natanzon.errors as nzerr

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json")

class CsvConfig:
    """Configuration for CSV output."""
    def __init__(self, column_separator = ",", quotechar = "\"", float_format = ".17g"):
        # 17 significant digits round-trip every double
        self.column_separator = column_separator
        self.quotechar = quotechar
        self.float_format = float_format

class Table:
    """Rows of named columns produced by a command."""
    def __init__(self, columns: list[str], rows: list[list[any]] = None):
        self.columns = columns
        self.rows = []
        for row in rows or []:
            self.append(row)

    def append(self, row: list[any]) -> None:
        if len(row) != len(self.columns):
            raise nzerr.NatanzonException(f"Row {row} does not match columns {self.columns}")
        self.rows.append(list(row))

    def __len__(self):
        return len(self.rows)

    def __str__(self) -> str:
        return f"Table({', '.join(self.columns)}; {len(self.rows)} rows)"

def format_value(x: any, csv_conf: CsvConfig = None) -> str:
    """Render a cell for CSV output."""
    if csv_conf is None:
        csv_conf = CsvConfig()
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return format(x, csv_conf.float_format)
    return str(x)

def write_csv(table: Table, stream: TextIO, csv_conf: CsvConfig = None) -> None:
    """Write a table with a header line."""
    if csv_conf is None:
        csv_conf = CsvConfig()
    writer = csv.writer(stream, delimiter=csv_conf.column_separator,
                        quotechar=csv_conf.quotechar, quoting=csv.QUOTE_MINIMAL,
                        lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(x, csv_conf) for x in row])

def _json_value(x: any) -> any:
    # numpy scalars are not JSON serializable
    if hasattr(x, "item"):
        return x.item()
    return x

def write_json(table: Table, stream: TextIO) -> None:
    """Write {"columns": [...], "rows": [{column: value}]}."""
    doc = {"columns": table.columns,
           "rows": [{c: _json_value(v) for c, v in zip(table.columns, row)} for row in table.rows]}
    # Serialized first so a non-finite value leaves the stream untouched
    text = json.dumps(doc, indent=2, allow_nan=False)
    stream.write(text + "\n")

def write_table(table: Table, fmt: str, stream: TextIO) -> None:
    if fmt == "csv":
        write_csv(table, stream)
    elif fmt == "json":
        write_json(table, stream)
    else:
        raise nzerr.InvalidValue("format", fmt, f"Expected one of {', '.join(FORMATS)}.")
    logger.debug(f"wrote {table} as {fmt}")
