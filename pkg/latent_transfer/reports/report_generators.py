"""
Report Generators for transfer sweeps and evaluations

Concrete implementations of ReportGenerator for different output formats
"""

from io import StringIO
from pathlib import Path
from typing import Dict, List, Type

import pandas as pd

from ..models.transfer_models import EvalReport, SweepRow
from .base_report import SWEEP_COLUMNS, ReportGenerator

try:
    import xlsxwriter
    EXCEL_AVAILABLE = True
except ImportError:
    EXCEL_AVAILABLE = False

try:
    from rich import box
    from rich.console import Console
    from rich.table import Table
    RICH_AVAILABLE = True
except ImportError:
    RICH_AVAILABLE = False

from tabulate import tabulate


def sweep_frame(rows: List[SweepRow]) -> pd.DataFrame:
    return pd.DataFrame([{col: getattr(r, col) for col in SWEEP_COLUMNS} for r in rows], columns=SWEEP_COLUMNS)


def eval_summary_frame(report: EvalReport) -> pd.DataFrame:
    record = {"acc": report.acc, "bleu": report.bleu, "ppl": report.ppl}
    for index, value in enumerate(report.per_aspect_acc, start=1):
        record[f"acc_aspect_{index}"] = value
    return pd.DataFrame([record])


def eval_rows_frame(report: EvalReport) -> pd.DataFrame:
    columns = ["source", "output", "target", "predicted", "correct", "ppl"]
    return pd.DataFrame([{c: getattr(r, c) for c in columns} for r in report.rows], columns=columns)


class CSVReportGenerator(ReportGenerator):
    """CSV report generator"""

    @property
    def format_name(self) -> str:
        return "CSV"

    @property
    def file_extension(self) -> str:
        return "csv"

    def generate_sweep_report(self, rows: List[SweepRow], output_file: str) -> str:
        sweep_frame(rows).to_csv(output_file, index=False, encoding="utf-8")
        self.logger.info(f"Generated CSV sweep report: {output_file}")
        return output_file

    def generate_eval_report(self, report: EvalReport, output_file: str) -> str:
        """Summary CSV at output_file plus `<stem>_rows.csv` with per-sentence rows"""
        eval_summary_frame(report).to_csv(output_file, index=False, encoding="utf-8")
        rows_file = Path(output_file).with_name(Path(output_file).stem + "_rows.csv")
        eval_rows_frame(report).to_csv(rows_file, index=False, encoding="utf-8")
        self.logger.info(f"Generated CSV evaluation report: {output_file}")
        return output_file


class TextReportGenerator(ReportGenerator):
    """Plain-text tables rendered with rich, or tabulate when rich is missing"""

    @property
    def format_name(self) -> str:
        return "Text"

    @property
    def file_extension(self) -> str:
        return "txt"

    def _render(self, title: str, frame: pd.DataFrame) -> str:
        if RICH_AVAILABLE:
            console = Console(file=StringIO(), width=120, force_terminal=False)
            table = Table(title=title, box=box.SIMPLE_HEAD)
            for column in frame.columns:
                table.add_column(str(column), justify="right")
            for record in frame.itertuples(index=False):
                table.add_row(*(f"{v:.4f}" if isinstance(v, float) else str(v) for v in record))
            console.print(table)
            return console.file.getvalue()
        return f"{title}\n" + tabulate(frame, headers="keys", tablefmt="grid", showindex=False, floatfmt=".4f") + "\n"

    def generate_sweep_report(self, rows: List[SweepRow], output_file: str) -> str:
        text = self._render("Transfer degree sweep", sweep_frame(rows))
        if rows:
            text += f"BLEU computed against {rows[0].bleu_reference}\n"
        Path(output_file).write_text(text, encoding="utf-8")
        self.logger.info(f"Generated text sweep report: {output_file}")
        return output_file

    def generate_eval_report(self, report: EvalReport, output_file: str) -> str:
        text = self._render("Evaluation", eval_summary_frame(report))
        Path(output_file).write_text(text, encoding="utf-8")
        self.logger.info(f"Generated text evaluation report: {output_file}")
        return output_file


class ExcelReportGenerator(ReportGenerator):
    """Excel workbook with a metrics-vs-weight chart"""

    @property
    def format_name(self) -> str:
        return "Excel"

    @property
    def file_extension(self) -> str:
        return "xlsx"

    def _formats(self, workbook) -> Dict:
        return {
            "header": workbook.add_format({"bold": True, "bg_color": "#1F4E79", "font_color": "white",
                                           "border": 1, "align": "center"}),
            "number": workbook.add_format({"num_format": "0.0000", "border": 1}),
            "text": workbook.add_format({"border": 1}),
        }

    def _write_frame(self, worksheet, frame: pd.DataFrame, formats: Dict) -> None:
        for col, name in enumerate(frame.columns):
            worksheet.write(0, col, name, formats["header"])
            worksheet.set_column(col, col, max(12, len(str(name)) + 2))
        for row, record in enumerate(frame.itertuples(index=False), start=1):
            for col, value in enumerate(record):
                if isinstance(value, (int, float)) and not isinstance(value, bool):
                    worksheet.write_number(row, col, float(value), formats["number"])
                else:
                    worksheet.write(row, col, str(value), formats["text"])

    def generate_sweep_report(self, rows: List[SweepRow], output_file: str) -> str:
        if not EXCEL_AVAILABLE:
            raise ImportError("xlsxwriter is required for Excel reports")
        frame = sweep_frame(rows)
        workbook = xlsxwriter.Workbook(output_file)
        formats = self._formats(workbook)
        worksheet = workbook.add_worksheet("Sweep")
        self._write_frame(worksheet, frame, formats)

        chart = workbook.add_chart({"type": "line"})
        last = len(frame)
        for column in ("acc", "success_rate", "bleu"):
            col = SWEEP_COLUMNS.index(column)
            chart.add_series({
                "name": column,
                "categories": ["Sweep", 1, 0, last, 0],
                "values": ["Sweep", 1, col, last, col],
                "marker": {"type": "circle"},
                "y2_axis": column == "bleu",
            })
        chart.set_title({"name": "Influence of the modification weight"})
        chart.set_x_axis({"name": "weight"})
        chart.set_y_axis({"name": "rate", "min": 0, "max": 1})
        chart.set_y2_axis({"name": "BLEU", "min": 0, "max": 100})
        worksheet.insert_chart(last + 2, 0, chart)
        workbook.close()
        self.logger.info(f"Generated Excel sweep report: {output_file}")
        return output_file

    def generate_eval_report(self, report: EvalReport, output_file: str) -> str:
        if not EXCEL_AVAILABLE:
            raise ImportError("xlsxwriter is required for Excel reports")
        workbook = xlsxwriter.Workbook(output_file)
        formats = self._formats(workbook)
        self._write_frame(workbook.add_worksheet("Summary"), eval_summary_frame(report), formats)
        self._write_frame(workbook.add_worksheet("Evaluation"), eval_rows_frame(report), formats)
        workbook.close()
        self.logger.info(f"Generated Excel evaluation report: {output_file}")
        return output_file


class ReportFactory:
    """Creates report generators by format name"""

    def __init__(self):
        self._generators: Dict[str, Type[ReportGenerator]] = {
            "csv": CSVReportGenerator,
            "text": TextReportGenerator,
            "excel": ExcelReportGenerator,
        }

    def register_generator(self, name: str, generator_class: Type[ReportGenerator]):
        self._generators[name] = generator_class

    def create_generator(self, name: str, output_path: str = None) -> ReportGenerator:
        if name not in self._generators:
            raise ValueError(f"Unsupported report format: {name}")
        return self._generators[name](output_path)
