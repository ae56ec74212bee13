"""Hierarchical word-and-character recurrent truecaser, implemented in numpy."""

from .corpus import (
    OTHER, SELF, Sentence, TrainingExample, WordClass, case_fold, case_fold_token,
    classify_word_class, derive_labels, read_corpus, tokenize, write_corpus,
)
from .distill import DistillJob, distill_train, generate_student_corpus
from .evaluate import MetricsReport, first_word_accuracy, per_class_report, score
from .features import embed_word, extract_char_ngrams, hash_feature
from .inference import decode_sentence, truecase, truecase_sentence, truecase_with_prefix
from .model import ModelConfig, TruecaserModel, sentence_log_likelihood
from .serialize import load_model, save_model
from .training import TrainOptions, TrainResult, train

__version__ = "0.1.0"
