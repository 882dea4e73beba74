"""End-to-end smoke tests for the python bindings."""

import math
import os

import metadisc


CONFIG_DIR = os.environ.get("METADISC_CONFIGS", "configs")


def test_discipline_names():
    names = metadisc.discipline_names()
    assert len(names) == 20
    assert names[0] == "Mathematical Sciences"
    assert names[19] == "Philosophy and Religious Studies"


def test_parse_and_map_record():
    xml = """<resource xmlns="http://datacite.org/schema/kernel-4">
      <identifier identifierType="DOI">10.1234/example</identifier>
      <titles><title>Gravitational wave observations</title></titles>
      <subjects>
        <subject subjectScheme="anzsrc">02 Physical Sciences</subject>
      </subjects>
    </resource>"""
    record = metadisc.parse_datacite_record(xml)
    assert record.identifier == "10.1234/example"
    assert metadisc.is_qualified(record)

    table = metadisc.load_mapping_table(os.path.join(CONFIG_DIR, "mapping_default.map"))
    labels, consumed = metadisc.map_record(record, table)
    assert labels == [1]
    assert consumed == [0]


def test_tfidf_matches_formula():
    vec = metadisc.TfidfVectorizer.fit(["soil moisture", "soil carbon", "ocean carbon"])
    # df(soil) = 2, N = 3 -> idf = ln(4/3) + 1
    idx = vec.terms.index("soil")
    assert abs(vec.idf[idx] - (math.log(4 / 3) + 1.0)) < 1e-12
    matrix = vec.transform(["soil moisture"])
    dense = matrix.to_dense()[0]
    norm = math.sqrt(sum(v * v for v in dense))
    assert abs(norm - 1.0) < 1e-12


def test_anova_f_known_value():
    assert metadisc.anova_f([0.0, 1.0, 2.0, 3.0], [True, True, False, False]) == 8.0


def test_f_beta_fixed_point():
    for beta in (0.5, 1.0, 2.0):
        assert abs(metadisc.f_beta(0.37, 0.37, beta) - 0.37) < 1e-12


def test_best_labels_greedy():
    docs = [("a", [0]), ("b", [0]), ("c", [1]), ("d", [0, 1]), ("e", [0, 1])]
    best = metadisc.assign_best_labels(docs)
    # counts after singles: {0: 2, 1: 1} -> d takes 1, then tie -> 0
    assert best == [0, 0, 1, 1, 0]


def test_train_and_predict_roundtrip(tmp_path):
    docs = []
    labels = []
    for i in range(40):
        cls = i % 2
        word = "alpha" if cls == 0 else "beta"
        docs.append(f"{word} signal {word} reading {i}")
        labels.append([cls])
    vec = metadisc.TfidfVectorizer.fit(docs)
    X = vec.transform(docs)
    model = metadisc.train("rf", X, labels, label_count=2,
                           config_json='{"n_trees": 10, "seed": 7, "threads": 1}')
    pred = model.predict(X)
    assert pred == labels

    path = str(tmp_path / "model.bin")
    metadisc.save_model(path, model, "{}")
    loaded = metadisc.load_model(path)
    assert loaded.predict(X) == labels

    macro, micro, per_label = metadisc.macro_micro_scores(labels, pred, labels=2, beta=1.0)
    assert macro == 1.0 and micro == 1.0


def test_english_detector():
    detector = metadisc.EnglishDetector.from_file(
        os.path.join(CONFIG_DIR, "english_top2000.txt"))
    assert detector.is_mostly_english("the data were collected from the field survey in spring")
    assert not detector.is_mostly_english("Die Daten wurden im Feld erhoben und geprüft")
    assert not detector.is_mostly_english("")
