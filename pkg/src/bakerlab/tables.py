"""CSV emission with 17 significant digits, and a parser that round-trips it."""

import csv
import io
import re

_INT = re.compile(r"[+-]?\d+\Z")


def format_value(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def parse_value(text: str):
    if _INT.match(text) and str(int(text)) == text:
        return int(text)
    try:
        return float(text)
    except ValueError:
        return text


def dumps(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def loads(text: str):
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return header, [[parse_value(v) for v in row] for row in reader]


def write_table(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(dumps(header, rows))


def read_table(path):
    with open(path, newline="") as fh:
        return loads(fh.read())
