"""
Abstract base class for dataset processors

Each on-disk dataset layout implements this interface and yields one Corpus
per split.
"""

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from ..errors import IngestionError
from ..models.transfer_models import Corpus, Example, Split
from .vocab import tokenize


class DatasetProcessor(ABC):
    """
    Base class for attribute-labelled dataset readers

    Subclasses locate the files of a split and parse them into Examples; this
    class handles truncation, reference alignment and logging.
    """

    def __init__(self, data_dir: str, max_len: int, file_prefix: str = ""):
        """
        Initialize the processor

        Args:
            data_dir: Directory holding the dataset files
            max_len: Sentences longer than this are truncated
            file_prefix: Prefix in front of every split file name
        """
        self.data_dir = Path(data_dir)
        self.max_len = max_len
        self.file_prefix = file_prefix
        self.logger = logging.getLogger(self.__class__.__name__)

        if not self.data_dir.is_dir():
            raise IngestionError("dataset directory does not exist", str(self.data_dir))

    @property
    @abstractmethod
    def layout_name(self) -> str:
        """Return the name of the layout this processor reads"""
        pass

    @property
    @abstractmethod
    def num_attributes(self) -> int:
        """Return the number of aspects A of every attribute vector"""
        pass

    @abstractmethod
    def split_available(self, split: Split) -> bool:
        """
        Report whether the files of a split are present

        Raises:
            IngestionError: only part of the split's files exist
        """
        pass

    @abstractmethod
    def read_split(self, split: Split) -> List[Example]:
        """
        Parse all examples of one split

        Returns:
            Examples in file order, untruncated
        """
        pass

    def split_path(self, name: str) -> Path:
        return self.data_dir / f"{self.file_prefix}{name}"

    def read_lines(self, path: Path) -> List[str]:
        if not path.exists():
            raise IngestionError("file not found", str(path))
        try:
            return path.read_text(encoding="utf-8").splitlines()
        except UnicodeDecodeError as e:
            raise IngestionError(f"not valid UTF-8 ({e.reason})", str(path)) from None

    def read_references(self, path: Path, expected: int) -> Optional[List[Optional[List[str]]]]:
        """Line-aligned reference sentences, or None when the file is absent"""
        if not path.exists():
            return None
        lines = self.read_lines(path)
        if len(lines) != expected:
            raise IngestionError(f"expected {expected} reference lines, found {len(lines)}", str(path))
        return [tokenize(line) for line in lines]

    def truncate(self, examples: List[Example]) -> List[Example]:
        truncated = 0
        for example in examples:
            if len(example.tokens) > self.max_len:
                example.tokens = example.tokens[: self.max_len]
                truncated += 1
        if truncated:
            self.logger.info(f"Truncated {truncated} sentences to {self.max_len} tokens")
        return examples

    def process(self, splits: Sequence[Split] = tuple(Split)) -> Dict[Split, Corpus]:
        """
        Read every available split

        Returns:
            Corpus per split found; the train split is mandatory
        """
        self.logger.info(f"Starting {self.layout_name} ingestion of: {self.data_dir}")
        corpora: Dict[Split, Corpus] = {}
        for split in splits:
            if not self.split_available(split):
                if split is Split.TRAIN:
                    raise IngestionError("training split not found", str(self.data_dir))
                self.logger.warning(f"No {split.value} split in {self.data_dir}")
                continue
            examples = self.truncate(self.read_split(split))
            corpora[split] = Corpus(split, examples, self.num_attributes, self.max_len)
            self.logger.info(f"Loaded {split.value}: {len(examples)} sentences")
        return corpora
