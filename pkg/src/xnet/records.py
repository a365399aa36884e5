"""Machine-readable output: flat ``key=value`` records, CSV tables, plan dumps.

Values are rendered deterministically (fractions as ``p/q``, floats with
``repr``, sequences comma-joined) so identical inputs give identical bytes.
"""

import csv
import hashlib
import io
import json
from fractions import Fraction

import numpy as np

MATRIX_PRECISION = 17


def fmt(value):
    """Canonical text for one value."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    if isinstance(value, (list, tuple)):
        return ",".join(fmt(v) for v in value)
    if value is None:
        return ""
    return str(value)


def _canonical(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _canonical(v) for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))}
    if isinstance(value, np.generic):
        return value.item()
    return value


def config_hash(config):
    """Short SHA-256 digest of a config mapping, independent of key order."""
    blob = json.dumps(_canonical(dict(config)), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def format_record(fields):
    """One ``key=value`` line per field, in the given order."""
    lines = []
    for key, value in fields.items():
        text = fmt(value)
        if "\n" in text:
            raise ValueError(f"record value for {key!r} spans lines")
        lines.append(f"{key}={text}")
    return "\n".join(lines) + "\n"


def parse_record(text):
    """Inverse of :func:`format_record`; values stay strings."""
    out = {}
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        out[key] = value
    return out


def format_csv(columns, rows, summary=None):
    """CSV table with a header row; ``summary`` fields follow as ``# key=value`` lines."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    if summary:
        for key, value in summary.items():
            buf.write(f"# {key}={fmt(value)}\n")
    return buf.getvalue()


def read_csv(text):
    """``(header, rows, summary)`` from :func:`format_csv` output."""
    body = [l for l in text.splitlines() if not l.startswith("#")]
    summary = parse_record("\n".join(l[2:] for l in text.splitlines() if l.startswith("# ")))
    rows = list(csv.reader(body))
    return rows[0], rows[1:], summary


def _matrix_lines(name, A, precision):
    A = np.atleast_2d(A)
    lines = [f"{name}.shape={A.shape[0]},{A.shape[1]}"]
    for r, row in enumerate(A):
        lines.append(f"{name}.row{r}=" + ",".join(f"{v:.{precision}g}" for v in row))
    return lines


def plan_record(plan, precision=MATRIX_PRECISION):
    """Flat record of a plan: dimensions, stream table and matrices row-major."""
    lines = [f"kind={plan.kind}", f"M={plan.M}", f"N={plan.N}", f"mu={plan.mu}",
             f"n={fmt(plan.n)}", f"total_streams={plan.total_streams}",
             f"achieved_dof={Fraction(plan.total_streams, plan.mu)}",
             f"precision={precision}"]
    for (j, i) in plan.messages():
        lines.append(f"streams.{j}_{i}={plan.streams[(j, i)]}")
    for (j, i) in plan.messages():
        lines.extend(_matrix_lines(f"V.{j}_{i}", plan.Vmat[(j, i)], precision))
    if plan.Umat is not None:
        for (j, i) in plan.messages():
            lines.extend(_matrix_lines(f"U.{j}_{i}", plan.Umat[(j, i)], precision))
    return "\n".join(lines) + "\n"


def read_plan_matrices(text, prefix):
    """Matrices named ``prefix.<j>_<i>`` from :func:`plan_record` text, keyed by ``(j, i)``."""
    fields = parse_record(text)
    out = {}
    for key, value in fields.items():
        if key.startswith(prefix + ".") and key.endswith(".shape"):
            tag = key[len(prefix) + 1:-len(".shape")]
            r, c = (int(v) for v in value.split(","))
            A = np.empty((r, c))
            for k in range(r):
                A[k] = [float(v) for v in fields[f"{prefix}.{tag}.row{k}"].split(",")]
            j, i = tag.split("_")
            out[(int(j), int(i))] = A
    return out
