import csv

import pytest

# Train-set class sizes from the HASOC 2021 class-distribution table.
TRAIN_COUNTS = {
    "english": {"A": {"HOF": 2501, "NOT": 1342},
                "B": {"HATE": 683, "OFFN": 622, "PRFN": 1196, "NONE": 1342}},
    "hindi": {"A": {"HOF": 1433, "NOT": 3161},
              "B": {"HATE": 566, "OFFN": 654, "PRFN": 213, "NONE": 3161}},
}


def write_table(path, header, rows, delimiter="\t"):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def count_rows(language):
    """Rows (tweet_id, text, task1, task2) reproducing the table's train class sizes."""
    b = TRAIN_COUNTS[language]["B"]
    rows = []
    i = 0
    for label_b in ("HATE", "OFFN", "PRFN", "NONE"):
        label_a = "NOT" if label_b == "NONE" else "HOF"
        for _ in range(b[label_b]):
            rows.append((f"{language[:2]}{i:05d}", f"tweet {i} about {label_b.lower()}", label_a, label_b))
            i += 1
    return rows


@pytest.fixture
def tsv(tmp_path):
    def make(rows, header=("tweet_id", "text", "task1", "task2"), name="data.tsv", delimiter="\t"):
        return write_table(tmp_path / name, header, rows, delimiter)
    return make


@pytest.fixture(scope="session")
def count_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("counts")
    return {
        lang: write_table(root / f"{lang}_train.tsv", ("tweet_id", "text", "task1", "task2"),
                          count_rows(lang))
        for lang in TRAIN_COUNTS
    }
