"""repositories package."""

from .config_repository import ConfigRepository, dump_json
from .paths import checked_path, output_stem, prepare_output
from .plot_renderer import SvgPlotRenderer
from .report_repository import JsonReportRepository
from .trajectory_repository import CsvTrajectoryRepository, TrajectoryTable, header

__all__ = [
    "ConfigRepository",
    "CsvTrajectoryRepository",
    "JsonReportRepository",
    "SvgPlotRenderer",
    "TrajectoryTable",
    "checked_path",
    "dump_json",
    "header",
    "output_stem",
    "prepare_output",
]
