import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tweetpolarity.resources import (ClusterMap, EmbeddingModel, Lexicon, ResourceError,
                                     dump_clusters, dump_embeddings, dump_lexicon, fingerprint,
                                     load_clusters, load_embeddings, load_lexicon)


def b(text):
    return io.BytesIO(text.encode("utf-8"))


class TestLexicon:
    def test_parse(self):
        lex = load_lexicon(b("good\t0.8\nbad\t-0.6"), "L")
        assert dict(lex.scores) == {"good": 0.8, "bad": -0.6}
        assert lex.name == "L" and len(lex) == 2

    def test_zero_rejected(self):
        with pytest.raises(ResourceError, match="line 1"):
            load_lexicon(b("good\t0.0"), "L")

    def test_last_wins(self):
        assert dict(load_lexicon(b("good\t0.5\ngood\t0.9"), "L").scores) == {"good": 0.9}

    def test_comments_and_hashtag_terms(self):
        lex = load_lexicon(b("# exported lexicon\n#happy\t0.7\n\nsad\t-1\n"), "L")
        assert dict(lex.scores) == {"#happy": 0.7, "sad": -1.0}

    @pytest.mark.parametrize("text,lineno", [
        ("good\t0.5\nbad", 2),
        ("good\t0.5\textra", 1),
        ("good\tyes", 1),
        ("ok\t1\ngood\tnan", 2),
        ("good\tinf", 1),
        ("\t0.5", 1),
    ])
    def test_malformed(self, text, lineno):
        with pytest.raises(ResourceError) as err:
            load_lexicon(b(text), "L")
        assert err.value.lineno == lineno

    def test_immutable(self):
        lex = load_lexicon(b("good\t1"), "L")
        with pytest.raises(TypeError):
            lex.scores["bad"] = -1.0

    @given(st.dictionaries(
        st.text(st.characters(blacklist_characters="\t\n\r", blacklist_categories=("Cs",)), min_size=1)
        .filter(lambda t: not t.startswith("﻿")),
        st.floats(allow_nan=False, allow_infinity=False).filter(lambda x: x != 0.0),
        max_size=20))
    def test_round_trip(self, scores):
        # a term that is just "#..." without a tab would be a comment, but dumps always carry a tab
        lex = Lexicon("L", scores)
        again = load_lexicon(dump_lexicon(lex), "L")
        assert dict(again.scores) == scores


class TestEmbeddings:
    def test_header(self):
        model = load_embeddings(b("2 2\ntea 1.0 2.0\ncoffee 1.5 2.5"))
        assert model.dim == 2 and len(model) == 2
        np.testing.assert_array_equal(model.get("coffee"), [1.5, 2.5])

    def test_no_header(self):
        model = load_embeddings(b("tea 1.0 2.0 3.0\n"))
        assert model.dim == 3

    def test_dimension_mismatch(self):
        with pytest.raises(ResourceError, match="line 2.*dimension"):
            load_embeddings(b("tea 1.0 2.0\ncoffee 1.0"))

    def test_header_dimension_enforced(self):
        with pytest.raises(ResourceError, match="line 2"):
            load_embeddings(b("1 3\ntea 1.0 2.0"))

    def test_empty(self):
        with pytest.raises(ResourceError, match="no vectors"):
            load_embeddings(b(""))

    def test_non_finite(self):
        with pytest.raises(ResourceError, match="line 1.*non-finite"):
            load_embeddings(b("tea 1.0 nan"))

    def test_non_numeric(self):
        with pytest.raises(ResourceError, match="line 2"):
            load_embeddings(b("tea 1 2\ncoffee 1 x"))

    def test_hashtag_word_and_comment(self):
        model = load_embeddings(b("# trained on tweets\n#happy 0.5 0.25\n"))
        assert list(model.vectors) == ["#happy"]

    def test_vectors_read_only(self):
        model = load_embeddings(b("tea 1 2"))
        with pytest.raises(ValueError):
            model.get("tea")[0] = 5.0

    @given(st.dictionaries(st.from_regex(r"[a-z]{1,8}", fullmatch=True),
                           st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64),
                                    min_size=3, max_size=3),
                           min_size=1, max_size=10),
           st.booleans())
    def test_round_trip_bit_exact(self, vectors, header):
        model = EmbeddingModel(3, vectors)
        again = load_embeddings(dump_embeddings(model, header=header))
        assert again.dim == 3 and set(again.vectors) == set(vectors)
        for word, vec in vectors.items():
            assert again.get(word).tobytes() == np.array(vec, dtype=np.float64).tobytes()


class TestClusters:
    def test_brown_three_columns(self):
        assert dict(load_clusters(b("00110\tcoffee\t42")).assignment) == {"coffee": "00110"}

    def test_two_columns(self):
        assert dict(load_clusters(b("coffee\tc7")).assignment) == {"coffee": "c7"}

    def test_mixed_columns(self):
        with pytest.raises(ResourceError, match="line 2.*inconsistent"):
            load_clusters(b("coffee\tc7\n0101\ttea\t3\n"))

    def test_bad_width(self):
        with pytest.raises(ResourceError):
            load_clusters(b("coffee\n"))

    def test_comment_lines(self):
        cm = load_clusters(b("# ark clusters\n0101\t#yay\t9\n"))
        assert dict(cm.assignment) == {"#yay": "0101"}

    @given(st.dictionaries(st.from_regex(r"[^\t\n\r#\x00]{1,10}", fullmatch=True),
                           st.from_regex(r"[01]{1,12}", fullmatch=True), max_size=20))
    def test_round_trip(self, assignment):
        assignment = {w: c for w, c in assignment.items() if w.strip("\r")}
        again = load_clusters(dump_clusters(ClusterMap(assignment)))
        assert dict(again.assignment) == assignment


def test_paths_and_fingerprint(tmp_path):
    path = tmp_path / "hl.tsv"
    path.write_bytes(b"good\t1\n")
    assert dict(load_lexicon(str(path), "hl").scores) == {"good": 1.0}
    fp = fingerprint(path, "hl")
    assert fp["name"] == "hl" and fp["size"] == 7 and len(fp["sha256"]) == 64


def test_resources_pickle():
    import pickle
    lex = Lexicon("L", {"a": 1.0})
    emb = EmbeddingModel(2, {"a": [1.0, 2.0]})
    cm = ClusterMap({"a": "c"})
    assert dict(pickle.loads(pickle.dumps(lex)).scores) == {"a": 1.0}
    assert pickle.loads(pickle.dumps(emb)).get("a").tolist() == [1.0, 2.0]
    assert dict(pickle.loads(pickle.dumps(cm)).assignment) == {"a": "c"}
