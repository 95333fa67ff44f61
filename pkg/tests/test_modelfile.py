from __future__ import annotations

import random

import numpy as np
import pytest

from ambitag.corpus import AnnotatedSentence, Token, parse_annotated
from ambitag.decoder import cohorts_for_tokens, decode_sentence
from ambitag.errors import ModelFormatError, TagInventoryError
from ambitag.lexicon import LexicalModel, SmoothingConfig
from ambitag.modelfile import (
    LEX_HEADER,
    TRANS_HEADER,
    _dec_char,
    _enc_char,
    dumps_model,
    load_model,
    loads_model,
    save_model,
)
from ambitag.ngram import TransitionModel
from ambitag.synth import build_synthetic_hmm, sample_corpus
from ambitag.tagset import parse_tagset

TS = parse_tagset("N\nV\nADV\n@dot\n@comma\n")

CORPUS_TEXT = (
    "the\tN\nwalk\tN\n.\t@dot\n\n"
    "walk\tV\nnow\tADV\n,\t@comma\n\n"
    "Walk\tV\ntalks\tV\n.\t@dot\n\n"
    "walk\tN\n"
)


def trained(text: str = CORPUS_TEXT, **cfg):
    corpus = parse_annotated(text, TS)
    lex = LexicalModel.train(corpus, TS, SmoothingConfig(**cfg))
    trans = TransitionModel.train(corpus, TS, k=cfg.get("k", 1.0))
    return lex, trans


class TestRoundTrip:
    def test_byte_identical(self):
        lex, trans = trained()
        text = dumps_model(lex, trans)
        lex2, trans2 = loads_model(text)
        assert dumps_model(lex2, trans2) == text

    def test_byte_identical_with_odd_config(self):
        lex, trans = trained(k=0.37, known_lookup_levels=3, support_epsilon=0.001, class_mix=0.25)
        text = dumps_model(lex, trans)
        assert dumps_model(*loads_model(text)) == text

    def test_byte_identical_synthetic_model(self):
        model = build_synthetic_hmm(n_tags=8, vocab=300, seed=4)
        corpus = sample_corpus(model, 5000, seed=5)
        lex = LexicalModel.train(corpus, model.tagset)
        trans = TransitionModel.train(corpus, model.tagset)
        text = dumps_model(lex, trans)
        assert dumps_model(*loads_model(text)) == text

    def test_reloaded_model_behaves_identically(self):
        lex, trans = trained()
        lex2, trans2 = loads_model(dumps_model(lex, trans))
        for surface in ("walk", "the", "now", ".", ",", "talks", "unseenish", "Xyz"):
            assert np.allclose(
                lex._dist_vector(surface), lex2._dist_vector(surface), atol=0
            )
            assert lex.is_known(surface) == lex2.is_known(surface)
            assert lex.candidate_tags(surface) == lex2.candidate_tags(surface)
        for a in range(len(TS) + 1):
            for b in range(len(TS) + 1):
                assert np.array_equal(trans.row(a, b), trans2.row(a, b))
        toks = [Token("walk"), Token("now"), Token(".")]
        d1 = decode_sentence(lex, trans, cohorts_for_tokens(lex, toks))
        d2 = decode_sentence(lex2, trans2, cohorts_for_tokens(lex2, toks))
        assert d1.viterbi_ids == d2.viterbi_ids
        assert d1.posteriors == d2.posteriors
        assert d1.log_likelihood == d2.log_likelihood

    def test_file_round_trip(self, tmp_path):
        lex, trans = trained()
        path = str(tmp_path / "model.txt")
        save_model(path, lex, trans)
        lex2, trans2 = load_model(path)
        assert dumps_model(lex2, trans2) == dumps_model(lex, trans)

    def test_save_accepts_stream(self, tmp_path):
        lex, trans = trained()
        path = tmp_path / "model.txt"
        with open(path, "w", encoding="utf-8") as fh:
            save_model(fh, lex, trans)
        assert path.read_text(encoding="utf-8") == dumps_model(lex, trans)

    def test_unicode_and_whitespace_surfaces(self):
        ts = parse_tagset("N\n@dot\n")
        corpus = [
            AnnotatedSentence(
                [Token("naïve"), Token("a b"), Token("tab\tchar"), Token("éclair")],
                [ts.tag("N")] * 4,
            )
        ]
        lex = LexicalModel.train(corpus, ts)
        trans = TransitionModel.train(corpus, ts)
        text = dumps_model(lex, trans)
        lex2, _ = loads_model(text)
        assert dumps_model(*loads_model(text)) == text
        for surface in ("naïve", "a b", "tab\tchar", "éclair"):
            assert lex2.is_known(surface)
            assert np.array_equal(lex._dist_vector(surface), lex2._dist_vector(surface))

    def test_trigram_counts_survive(self):
        lex, trans = trained()
        _, trans2 = loads_model(dumps_model(lex, trans))
        assert trans2.trigrams == trans.trigrams
        assert trans2.k == trans.k


class TestCharEscaping:
    @pytest.mark.parametrize("ch", ["a", "Z", "é", "-", "'", "真"])
    def test_printable_verbatim(self, ch):
        assert _enc_char(ch) == ch
        assert _dec_char(ch) == ch

    @pytest.mark.parametrize("ch,enc", [(" ", "\\u0020"), ("\t", "\\u0009"), ("\\", "\\u005c")])
    def test_escaped(self, ch, enc):
        assert _enc_char(ch) == enc
        assert _dec_char(enc) == ch

    def test_astral_plane(self):
        ch = "\U0001f600"
        if _enc_char(ch) != ch:  # emoji are printable; force the wide escape
            assert _dec_char(_enc_char(ch)) == ch
        assert _dec_char("\\U0001f600") == ch

    def test_round_trip_property(self):
        rng = random.Random(0)
        for _ in range(200):
            ch = chr(rng.randrange(1, 0x2FFFF))
            assert _dec_char(_enc_char(ch)) == ch

    def test_bad_field(self):
        with pytest.raises(ModelFormatError):
            _dec_char("ab")


class TestFormatErrors:
    def dump(self):
        return dumps_model(*trained())

    def test_wrong_magic(self):
        with pytest.raises(ModelFormatError, match=LEX_HEADER):
            loads_model("something else\n")

    def test_truncated(self):
        text = self.dump()
        with pytest.raises(ModelFormatError, match="unexpected end"):
            loads_model(text[: len(text) // 2].rsplit("\n", 1)[0])

    def test_missing_transition_section(self):
        text = self.dump().split(TRANS_HEADER)[0]
        with pytest.raises(ModelFormatError):
            loads_model(text)

    def test_trailing_garbage(self):
        with pytest.raises(ModelFormatError, match="trailing"):
            loads_model(self.dump() + "leftover\n")

    def test_trailing_blank_lines_tolerated(self):
        lex, trans = loads_model(self.dump() + "\n\n")
        assert dumps_model(lex, trans) == self.dump()

    def test_unknown_tag_in_body(self):
        lines = self.dump().splitlines()
        idx = next(i for i, l in enumerate(lines) if l.startswith("trigrams")) + 1
        lines[idx] = lines[idx].replace(lines[idx].split()[0], "BOGUS", 1)
        with pytest.raises(TagInventoryError):
            loads_model("\n".join(lines) + "\n")

    def test_bad_config_line(self):
        text = self.dump().replace(" class-mix ", " classmix ", 1)
        with pytest.raises(ModelFormatError, match="config"):
            loads_model(text)

    def test_trie_depth_out_of_order(self):
        lines = self.dump().splitlines()
        idx = next(i for i, l in enumerate(lines) if l.startswith("trie ")) + 1
        first = lines[idx].split()
        first[0] = "5"
        lines[idx] = " ".join(first)
        with pytest.raises(ModelFormatError, match="depth"):
            loads_model("\n".join(lines) + "\n")

    def test_bad_trigram_line(self):
        lines = self.dump().splitlines()
        idx = next(i for i, l in enumerate(lines) if l.startswith("trigrams")) + 1
        lines[idx] = "N V"
        with pytest.raises(ModelFormatError, match="trigram"):
            loads_model("\n".join(lines) + "\n")
