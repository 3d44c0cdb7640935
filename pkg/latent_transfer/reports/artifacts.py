"""Trace JSON-lines and training-history CSVs"""

from pathlib import Path
from typing import Iterable, Union

import orjson
import pandas as pd

from ..models.transfer_models import TrainingHistory, TransferResult


def write_trace_jsonl(results: Iterable[TransferResult], path: Union[str, Path]) -> int:
    """One JSON object per sentence; returns the number of lines written"""
    count = 0
    with open(path, "wb") as handle:
        for result in results:
            handle.write(orjson.dumps(result.to_record(),
                                      option=orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_APPEND_NEWLINE))
            count += 1
    return count


def read_trace_jsonl(path: Union[str, Path]) -> list:
    with open(path, "rb") as handle:
        return [orjson.loads(line) for line in handle if line.strip()]


def write_history_csv(history: TrainingHistory, path: Union[str, Path]) -> pd.DataFrame:
    frame = pd.DataFrame({
        "epoch": range(1, len(history.train_loss) + 1),
        "train_loss": history.train_loss,
        history.metric_name: history.dev_metric,
    })
    frame["best"] = frame["epoch"] == history.best_epoch
    frame.to_csv(path, index=False, encoding="utf-8")
    return frame
