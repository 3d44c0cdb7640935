"""
Abstract base class for report generators

Each output format (CSV, text, Excel) implements this interface for sweep
and evaluation results.
"""

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import List, Optional

from ..models.transfer_models import EvalReport, SweepRow

SWEEP_COLUMNS = ["weight", "acc", "bleu", "ppl", "mean_edit_norm", "success_rate"]


class ReportGenerator(ABC):
    """
    Abstract base class for report generators
    """

    def __init__(self, output_path: Optional[str] = None):
        """
        Initialize the report generator

        Args:
            output_path: Optional output directory for reports
        """
        self.output_path = Path(output_path) if output_path else None
        self.logger = logging.getLogger(self.__class__.__name__)

    @property
    @abstractmethod
    def format_name(self) -> str:
        """Return the report format name"""
        pass

    @property
    @abstractmethod
    def file_extension(self) -> str:
        """Return the file extension for this format"""
        pass

    @abstractmethod
    def generate_sweep_report(self, rows: List[SweepRow], output_file: str) -> str:
        """
        Generate the transfer-degree sweep report

        Args:
            rows: One row per singleton weight
            output_file: Output file path

        Returns:
            Path to generated report file
        """
        pass

    @abstractmethod
    def generate_eval_report(self, report: EvalReport, output_file: str) -> str:
        """
        Generate the evaluation report

        Args:
            report: Aggregate metrics and per-sentence rows
            output_file: Output file path

        Returns:
            Path to generated report file
        """
        pass

    def default_filename(self, stem: str) -> str:
        name = f"{stem}.{self.file_extension}"
        return str(self.output_path / name) if self.output_path else name
