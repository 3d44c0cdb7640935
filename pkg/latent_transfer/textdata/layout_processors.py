"""
Dataset layout readers

File-per-attribute layout: `<prefix><split>.<attr_name>` files, one sentence
per line, with optional line-aligned `<prefix><split>.<attr_name>.ref`
reference files. TSV layout: `<prefix><split>.tsv` rows of
`sentence<TAB>rating_1<TAB>...<TAB>rating_A`, ratings in [0, 1].
"""

import csv
import re
from typing import List, Sequence

import pandas as pd

from ..errors import ContractError, IngestionError
from ..models.transfer_models import AttributeVector, Example, Split
from .base_processor import DatasetProcessor
from .vocab import tokenize


class FilePerAttributeProcessor(DatasetProcessor):
    """
    One file per attribute value per split

    With two attribute names the k-th name maps to the scalar value k
    (0.0 / 1.0). With more names each one becomes its own aspect and the
    file's sentences get a one-hot vector.
    """

    def __init__(self, data_dir: str, max_len: int, attribute_names: Sequence[str] = ("0", "1"),
                 file_prefix: str = ""):
        super().__init__(data_dir, max_len, file_prefix)
        if len(attribute_names) < 2:
            raise ContractError("file-per-attribute layout needs at least two attribute names")
        self.attribute_names = list(attribute_names)

    @property
    def layout_name(self) -> str:
        return "file-per-attribute"

    @property
    def num_attributes(self) -> int:
        return 1 if len(self.attribute_names) == 2 else len(self.attribute_names)

    def attribute_for(self, index: int) -> AttributeVector:
        if len(self.attribute_names) == 2:
            return AttributeVector.of(float(index))
        values = [0.0] * len(self.attribute_names)
        values[index] = 1.0
        return AttributeVector.of(*values)

    def split_available(self, split: Split) -> bool:
        paths = [self.split_path(f"{split.value}.{name}") for name in self.attribute_names]
        present = [p.exists() for p in paths]
        if any(present) and not all(present):
            missing = paths[present.index(False)]
            raise IngestionError("file not found", str(missing))
        return all(present)

    def read_split(self, split: Split) -> List[Example]:
        examples: List[Example] = []
        for index, name in enumerate(self.attribute_names):
            path = self.split_path(f"{split.value}.{name}")
            lines = self.read_lines(path)
            references = self.read_references(path.with_name(path.name + ".ref"), len(lines))
            attributes = self.attribute_for(index)
            skipped = 0
            for line_no, line in enumerate(lines):
                tokens = tokenize(line)
                if not tokens:
                    skipped += 1
                    continue
                reference = references[line_no] if references is not None else None
                examples.append(Example(tokens, attributes, reference))
            if skipped:
                self.logger.warning(f"Skipped {skipped} empty lines in {path}")
            self.logger.info(f"Read {len(lines) - skipped} sentences from {path.name}")
        return examples


class TsvProcessor(DatasetProcessor):
    """Tab-separated sentences with A decimal ratings per row"""

    _LINE_RE = re.compile(r"line (\d+)")

    def __init__(self, data_dir: str, max_len: int, num_attributes: int = 0, file_prefix: str = ""):
        """
        Args:
            num_attributes: Expected A; 0 infers it from the first row of the train split
        """
        super().__init__(data_dir, max_len, file_prefix)
        self._num_attributes = num_attributes

    @property
    def layout_name(self) -> str:
        return "tsv"

    @property
    def num_attributes(self) -> int:
        return self._num_attributes

    def split_available(self, split: Split) -> bool:
        return self.split_path(f"{split.value}.tsv").exists()

    def _read_frame(self, path) -> pd.DataFrame:
        if not path.exists():
            raise IngestionError("file not found", str(path))
        try:
            return pd.read_csv(
                path, sep="\t", header=None, dtype=str, keep_default_na=False,
                quoting=csv.QUOTE_NONE, engine="python", skip_blank_lines=False,
                encoding="utf-8",
            )
        except pd.errors.EmptyDataError:
            return pd.DataFrame()
        except pd.errors.ParserError as e:
            match = self._LINE_RE.search(str(e))
            line = int(match.group(1)) if match else None
            raise IngestionError("inconsistent number of columns", str(path), line) from None
        except UnicodeDecodeError as e:
            raise IngestionError(f"not valid UTF-8 ({e.reason})", str(path)) from None

    def read_split(self, split: Split) -> List[Example]:
        path = self.split_path(f"{split.value}.tsv")
        df = self._read_frame(path)
        if df.empty:
            self.logger.warning(f"{path} holds no rows")
            return []
        if self._num_attributes == 0:
            self._num_attributes = df.shape[1] - 1
            self.logger.info(f"Inferred {self._num_attributes} aspects from {path.name}")
        if self._num_attributes < 1:
            raise IngestionError("rows need a sentence and at least one rating", str(path), 1)

        references = self.read_references(path.with_name(path.name + ".ref"), len(df))
        examples: List[Example] = []
        for row_index, row in enumerate(df.itertuples(index=False, name=None)):
            line = row_index + 1
            sentence = row[0] if isinstance(row[0], str) else ""
            cells = [c for c in row[1:] if isinstance(c, str) and c != ""]
            if not sentence.strip() and not cells:
                self.logger.warning(f"Skipped empty line {line} in {path}")
                continue
            if len(cells) != self._num_attributes:
                raise IngestionError(
                    f"expected {self._num_attributes} ratings, found {len(cells)}", str(path), line
                )
            examples.append(Example(
                tokenize(sentence),
                self._parse_ratings(cells, path, line),
                references[row_index] if references is not None else None,
            ))
        return examples

    @staticmethod
    def _parse_ratings(cells: Sequence[str], path, line: int) -> AttributeVector:
        values = []
        for cell in cells:
            try:
                value = float(cell)
            except ValueError:
                raise IngestionError(f"rating '{cell}' is not a number", str(path), line) from None
            if not (0.0 <= value <= 1.0):
                raise IngestionError(f"rating {value} outside [0, 1]", str(path), line)
            values.append(value)
        return AttributeVector.of(*values)
