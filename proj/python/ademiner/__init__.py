"""Tweet-mining pipeline toolkit: corpus handling, normalization, byte-level
BPE tokenization, class-imbalance resampling, baseline models, and the
shared-task scorer. The heavy lifting lives in the C++ extension module."""

from ademiner._core import (  # noqa: F401
    AdeError,
    BpeVocab,
    LabeledDataset,
    LinearModel,
    SpanAnnotation,
    TaggerModel,
    TrainConfig,
    Tweet,
    __version__,
    align_spans_to_bio,
    apply_sampling_plan,
    byte_vocab,
    clean_overlapping_spans,
    decode,
    demojize,
    encode,
    extract_spans,
    f1,
    load_classification_dataset,
    load_classifier,
    load_span_dataset,
    load_tagger,
    load_vocab,
    majority_vote,
    normalize_tweet,
    precision,
    predict_label,
    random_oversample,
    random_undersample,
    recall,
    round_display,
    run_pipeline,
    save_classifier,
    save_tagger,
    score_classification,
    score_spans,
    strip_entities,
    summarize,
    train_classifier,
    train_tagger,
)
