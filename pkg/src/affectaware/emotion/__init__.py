from .compare import ComparisonReport, compare_learners, evaluate
from .dataset import (Dataset, DatasetError, LabeledSample, gaussian_blobs, ingest_dataset,
                      remove_outliers, split)
from .learners import (KINDS, EmotionModel, ModelError, load_model, save_model, train)
from .metrics import ConfusionMatrix

__all__ = [
    "ComparisonReport", "ConfusionMatrix", "Dataset", "DatasetError", "EmotionModel", "KINDS",
    "LabeledSample", "ModelError", "compare_learners", "evaluate", "gaussian_blobs",
    "ingest_dataset", "load_model", "remove_outliers", "save_model", "split", "train",
]
