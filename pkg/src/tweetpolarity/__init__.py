"""Polarity classification for tweets.

Preprocessing with negation marking, n-gram / syntactic / lexicon / cluster /
embedding-pooling features, a one-vs-rest linear SVM and the usual
message-polarity metrics.
"""

from .evaluation import (ConfusionMatrix, EvalReport, accuracy, baseline_report,
                         confusion_matrix, evaluate, f1_pn, macro_recall)
from .features import (FeatureSpace, Featurizer, SparseVector, build_vocabulary,
                       cluster_features, embed_pool, extract_bitagged, extract_bonw,
                       extract_bow, extract_pos_counts, lexicon_features,
                       lexicon_polarity, vectorize)
from .resources import (ClusterMap, EmbeddingModel, Lexicon, ResourceError,
                        load_clusters, load_embeddings, load_lexicon)
from .svm import (BinarySvm, SvmModel, decision_values, load_model, predict,
                  save_model, train_binary, train_ovr)
from .text import (LanguageProfile, Token, Tweet, attach_tags, mark_negation,
                   normalize, preprocess, tokenize)

__version__ = "0.1.0"
