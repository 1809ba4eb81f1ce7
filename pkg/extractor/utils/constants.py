# Путь: extractor/utils/constants.py

NA_LABEL = "NA"
NA_INDEX = 0
NONE_ROLE = "None"

# BIO-теги тэггера сущностей
BIO_TAGS = ("O", "B", "I")

PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"

PROBABILITY_FLOOR = 1e-12
NEW_ROW_INIT_STD = 0.02
LONG_TAIL_RATIO = 0.8

# Артефакты стадии в каталоге запуска
DETECTION_CHECKPOINT = "detection.pt"
ARGUMENT_CHECKPOINT = "arguments.pt"
PROTOTYPES_FILE = "prototypes.json"
MEMORY_FILE = "memory.json"
ARGUMENT_MEMORY_FILE = "argument_memory.json"
AUGMENTATION_LOG = "augmentation.jsonl"
TRAINING_CURVE = "training_curve.csv"
PREDICTIONS_FILE = "predictions.jsonl"
STAGE_REPORT = "report.json"
RUN_STATE_FILE = "run_state.json"
CONFIG_FILE = "config.json"
REPORTS_CSV = "reports.csv"
SUMMARY_JSON = "summary.json"
F1_PLOT = "f1_curve.png"
