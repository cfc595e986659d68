# common/config.py

# ==============================
# Labels
# ==============================
# Column order of the gold label vector; also the default chain order.
LABEL_COLUMNS = ("app_usage", "inclusiveness", "user_reaction", "non_human_centric")
N_LABELS = len(LABEL_COLUMNS)

# ==============================
# Corpus / split
# ==============================
CSV_COLUMNS = [
    "id", "source", "project", "text",
    "app_usage", "inclusiveness", "user_reaction", "non_human_centric",
    "subcategories",
]
SUBCATEGORY_SEP = ";"

TRAIN_FRACTION = 0.75
SPLIT_SEED = 0
STRATIFY = False  # unstratified by default; stratified split is opt-in

# ==============================
# Preprocessing resources (textprep/resources.py)
# ==============================
STOPWORD_LIST_VERSION = "en-179-v1"
CONTRACTION_MAP_VERSION = "en-contractions-v1"
STEM_MAX_PASSES = 8     # upper bound on stem() passes

# ==============================
# Features
# ==============================
TFIDF_ANALYZER = "char"
TFIDF_NGRAM = (4, 4)       # headline variant
TFIDF_MIN_DF = 1           # no pruning unless asked for

# n-gram sweep used by `grid --sweep`
WORD_NGRAM_SWEEP = [(1, 1), (1, 2), (1, 3), (2, 2), (3, 3), (4, 4)]

# ==============================
# Linear learners (linear/)
# ==============================
L2_LAMBDA = 1e-4
EPOCHS = 50
LEARNING_RATE = 0.1        # decayed as lr / (1 + epoch)
TOLERANCE = 1e-6           # early stop on |delta train objective|
RESCALE_FLOOR = 1e-9       # fold weight scale back into the vector below this

# ==============================
# Trees (trees/)
# ==============================
FOREST_N_TREES = 100
FOREST_MAX_DEPTH = 12
FOREST_MIN_SAMPLES_LEAF = 1
FOREST_FEATURE_SUBSAMPLE = "sqrt"
FOREST_BOOTSTRAP = True

BOOST_N_ROUNDS = 100
BOOST_MAX_DEPTH = 3
BOOST_SHRINKAGE = 0.1

TREE_TOP_K = 2000          # dense projection width for tree learners
PROBA_CLIP = 1e-6          # base-rate clipping for the initial log-odds

# ==============================
# Bench
# ==============================
BENCH_DATASETS = ("AppReviews", "IssueComments", "Combined")
BENCH_STRATEGIES = ("OvR", "CC")
BENCH_FEATURES = ("Tfidf", "Word2vec", "Stacked")
BENCH_MODELS = ("LR", "SVM", "RF", "GBT")
REFERENCE_FILE = "reference_table4.csv"
REPORT_DECIMALS = 4
REPORT_COLUMNS = [
    "dataset", "strategy", "feature", "analyzer", "ngram", "model",
    "precision", "recall", "accuracy", "f1", "hamming_loss", "seconds",
]

# ==============================
# GitHub REST
# ==============================
GITHUB_API = "https://api.github.com"
GITHUB_ACCEPT = "application/vnd.github+json"
GITHUB_TOKEN_ENV = "HCI_GITHUB_TOKEN"
GITHUB_PER_PAGE = 100
GITHUB_MAX_RETRIES = 3
GITHUB_TIMEOUT_SEC = 30
GITHUB_RESET_BUFFER_SEC = 1
GITHUB_BACKOFF_BASE_SEC = 2.0   # doubles per retry when the limit headers are unreadable

# ==============================
# Project selection filters
# ==============================
MIN_ISSUE_COMMENTS = 100
MIN_STARS = 1000
MIN_DOWNLOADS_MILLIONS = 5
