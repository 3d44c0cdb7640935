"""
Processor factory for creating dataset readers by layout
"""

from typing import Dict, Optional, Sequence, Type

from ..models.transfer_models import Corpus, DataConfig, DatasetLayout, Split
from .base_processor import DatasetProcessor
from .layout_processors import FilePerAttributeProcessor, TsvProcessor


class ProcessorFactory:
    """Factory class for creating dataset processors based on layout."""

    def __init__(self):
        self._processors: Dict[DatasetLayout, Type[DatasetProcessor]] = {
            DatasetLayout.FILE_PER_ATTRIBUTE: FilePerAttributeProcessor,
            DatasetLayout.TSV: TsvProcessor,
        }

    def register_processor(self, layout: DatasetLayout, processor_class: Type[DatasetProcessor]):
        """Register a new processor type."""
        self._processors[layout] = processor_class

    def create_processor(self, data_dir: str, layout: DatasetLayout, max_len: int,
                         attribute_names: Optional[Sequence[str]] = None,
                         file_prefix: str = "") -> DatasetProcessor:
        """
        Create the processor for a dataset layout.

        Args:
            data_dir: Directory with the dataset files
            layout: On-disk layout
            max_len: Truncation length
            attribute_names: Ordered attribute file names (file-per-attribute only)
            file_prefix: Prefix of every split file

        Raises:
            ValueError: If the layout is not supported
        """
        if layout not in self._processors:
            raise ValueError(f"Unsupported dataset layout: {layout}")
        processor_class = self._processors[layout]
        if layout is DatasetLayout.FILE_PER_ATTRIBUTE:
            return processor_class(data_dir, max_len, attribute_names or ("0", "1"), file_prefix)
        return processor_class(data_dir, max_len, file_prefix=file_prefix)

    def get_supported_layouts(self) -> Dict[str, str]:
        """Get supported layouts and their descriptions."""
        return {
            DatasetLayout.FILE_PER_ATTRIBUTE.value: "one sentence file per attribute value per split",
            DatasetLayout.TSV.value: "tab-separated sentence and ratings in [0, 1]",
        }


def load_dataset(data_dir: str, layout: DatasetLayout, max_len: int,
                 attribute_names: Optional[Sequence[str]] = None,
                 file_prefix: str = "") -> Dict[Split, Corpus]:
    """Read every available split of a dataset"""
    processor = ProcessorFactory().create_processor(data_dir, layout, max_len, attribute_names, file_prefix)
    return processor.process()


def load_from_config(data: DataConfig, max_len: int) -> Dict[Split, Corpus]:
    return load_dataset(data.path, data.layout, max_len, data.attribute_names, data.file_prefix)
