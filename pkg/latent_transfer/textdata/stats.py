"""Dataset statistics table"""

from typing import Dict

import pandas as pd

from ..models.transfer_models import Corpus, Split
from .vocab import Vocab


def _label(values) -> str:
    return ",".join(f"{v:g}" for v in values)


def dataset_stats(corpora: Dict[Split, Corpus], vocab: Vocab) -> pd.DataFrame:
    """
    Per split and attribute vector: item count, max and mean sentence length

    The vocabulary size is repeated on every row so the table stands alone
    when written to CSV.
    """
    records = []
    for split, corpus in corpora.items():
        rows = pd.DataFrame({
            "attribute": [_label(item.attributes.values) for item in corpus.items],
            "length": [len(item.tokens) for item in corpus.items],
        })
        if rows.empty:
            continue
        grouped = rows.groupby("attribute", sort=True)["length"].agg(["count", "max", "mean"])
        for attribute, stats in grouped.iterrows():
            records.append({
                "split": split.value,
                "attribute": attribute,
                "count": int(stats["count"]),
                "max_length": int(stats["max"]),
                "mean_length": round(float(stats["mean"]), 2),
                "vocab": vocab.size,
            })
    return pd.DataFrame(records, columns=["split", "attribute", "count", "max_length", "mean_length", "vocab"])
