"""CSV tables and plot scripts."""

from collections.abc import Iterable, Mapping, Sequence
import csv
import logging
import math
from pathlib import Path
import sys

from .const import (
    CONF_K1,
    CONF_N_DETECTORS,
    COEFFICIENTS_CSV_HEADER,
    CROSSOVER_CSV_HEADER,
    CSV_HEADER,
    QUANTITIES_CSV_HEADER,
    StudyKind,
)
from .crossover import CrossoverResult, NoCrossover
from .exceptions import OutputFormatError
from .sweep import SweepRow
from .util import format_number

_LOGGER = logging.getLogger(__name__)

PLOT_SCRIPT = '''"""Plot fidelity against {axis_label} from {csv_name}."""

from collections import defaultdict
import csv

import matplotlib.pyplot as plt

CSV_PATH = {csv_path!r}
FIGURE_PATH = {figure_path!r}
LABELS = {labels!r}

series = defaultdict(list)
with open(CSV_PATH, newline="") as handle:
    for row in csv.DictReader(handle):
        x = {x_expression}
        if {x_filter}:
            series[int(row["scheme"])].append((x, float(row["fidelity"])))

fig, ax = plt.subplots()
for scheme, label in LABELS.items():
    points = sorted(series[scheme])
    ax.plot([x for x, _ in points], [y for _, y in points], marker="o", label=label)
{axis_setup}ax.set_xlabel({axis_label!r})
ax.set_ylabel("fidelity")
ax.legend()
fig.savefig(FIGURE_PATH, dpi=150)
plt.show()
'''

# kind -> (x expression, x filter, extra axis setup)
PLOT_AXES = {
    StudyKind.DETECTOR_COUNT: ('int(float(row["axis_value"]))', "True", ""),
    StudyKind.PRESENCE: (
        '1 - float(row["axis_value"])',
        "x > 0",
        'ax.set_xscale("log")\n',
    ),
    StudyKind.GENERIC: ('float(row["axis_value"])', "True", ""),
}


def study_kind_for_axis(axis: str) -> StudyKind:
    """Return the plot layout that suits a sweep axis."""
    if axis == CONF_N_DETECTORS:
        return StudyKind.DETECTOR_COUNT
    if axis == CONF_K1:
        return StudyKind.PRESENCE
    return StudyKind.GENERIC


def _write_table(
    header: Sequence[str], rows: Iterable[Sequence[str]], path: Path | None
) -> int:
    rows = list(rows)
    if path is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    else:
        with Path(path).open("w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        _LOGGER.info("Wrote %d rows to %s", len(rows), path)
    return len(rows)


def sweep_row_values(row: SweepRow) -> list[str]:
    """Return one CSV row of a sweep table."""
    distribution = row.distribution
    return [
        str(int(row.scheme)),
        str(row.n_detectors),
        row.axis,
        format_number(row.axis_value),
        *(
            format_number(value)
            for value in (
                distribution.p_zero,
                distribution.p_one,
                distribution.p_loss,
                distribution.p_mixed,
                distribution.fidelity,
                distribution.expected_gates,
            )
        ),
    ]


def write_csv(rows: Sequence[SweepRow], path: Path | None = None) -> int:
    """Write sweep results, one line per row; None writes to stdout."""
    if not rows:
        raise OutputFormatError("refusing to write an empty table")
    return _write_table(CSV_HEADER, (sweep_row_values(row) for row in rows), path)


def write_crossover_csv(
    results: Sequence[CrossoverResult | NoCrossover], path: Path | None = None
) -> int:
    """Write break-even points; points without a crossover get nan."""
    if not results:
        raise OutputFormatError("refusing to write an empty table")

    def values(result: CrossoverResult | NoCrossover) -> list[str]:
        if isinstance(result, NoCrossover):
            p_l, iterations, width = math.nan, 0, math.nan
        else:
            p_l, iterations, width = (
                result.p_l,
                result.iterations,
                result.bracket_width,
            )
        return [
            format_number(result.p_c),
            format_number(result.p_x),
            format_number(result.p_d),
            format_number(p_l),
            str(iterations),
            format_number(width),
        ]

    return _write_table(CROSSOVER_CSV_HEADER, map(values, results), path)


def write_coefficients_csv(
    coefficients: Mapping[str, float], path: Path | None = None
) -> int:
    """Write surface coefficients as term,coefficient rows."""
    return _write_table(
        COEFFICIENTS_CSV_HEADER,
        ([term, format_number(value)] for term, value in coefficients.items()),
        path,
    )


def write_quantities_csv(
    quantities: Mapping[str, float], path: Path | None = None
) -> int:
    """Write named scalar results as quantity,value rows."""
    return _write_table(
        QUANTITIES_CSV_HEADER,
        ([name, format_number(value)] for name, value in quantities.items()),
        path,
    )


def emit_plot_script(csv_path: Path, study_kind: StudyKind | None = None) -> Path:
    """Write a matplotlib script that draws fidelity per scheme from a sweep CSV.

    The script lands next to the CSV as `<stem>_plot.py`. The study kind is
    taken from the CSV's axis column unless given.
    """
    csv_path = Path(csv_path)
    with csv_path.open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_HEADER:
            raise OutputFormatError(
                f"{csv_path} has header {header}, expected {','.join(CSV_HEADER)}"
            )
        rows = [dict(zip(header, row)) for row in reader]
    if not rows:
        raise OutputFormatError(f"{csv_path} holds no results")

    axis = rows[0]["axis"]
    if study_kind is None:
        study_kind = study_kind_for_axis(axis)
    study_kind = StudyKind(study_kind)
    schemes = sorted({int(row["scheme"]) for row in rows})
    x_expression, x_filter, axis_setup = PLOT_AXES[study_kind]
    axis_label = {
        StudyKind.DETECTOR_COUNT: "number of detectors",
        StudyKind.PRESENCE: "1 - k1",
    }.get(study_kind, axis)

    script_path = csv_path.with_name(f"{csv_path.stem}_plot.py")
    script_path.write_text(
        PLOT_SCRIPT.format(
            axis_label=axis_label,
            csv_name=csv_path.name,
            csv_path=str(csv_path),
            figure_path=str(csv_path.with_suffix(".png")),
            labels={scheme: f"Scheme {scheme}" for scheme in schemes},
            x_expression=x_expression,
            x_filter=x_filter,
            axis_setup=axis_setup,
        )
    )
    _LOGGER.info("Wrote %s plot script to %s", study_kind, script_path)
    return script_path
