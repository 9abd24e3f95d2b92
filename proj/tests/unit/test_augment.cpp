#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "hcgnn/augment/augment.hpp"
#include "hcgnn/diffcore/error.hpp"
#include "oracle/corpus_fixtures.hpp"

using namespace hcgnn;
using namespace hcgnn::augment;
using testutil::make_dialogue;

namespace {

TraitVector tv(double n, double e, double o, double a, double c) { return TraitVector({n, e, o, a, c}); }
TraitVector constant(double x) { return tv(x, x, x, x, x); }

std::vector<const Dialogue*> pointers(const Corpus& c) {
    std::vector<const Dialogue*> out;
    for (const auto& d : c.dialogues()) out.push_back(&d);
    return out;
}

/// Two speakers with labels all-0 and all-1, each initiating `per` dialogues.
Corpus two_label_corpus(std::size_t per, std::size_t turns) {
    Corpus c;
    c.add_speaker({"lo", constant(0.0)});
    c.add_speaker({"hi", constant(1.0)});
    c.add_speaker({"x", std::nullopt});
    for (std::size_t k = 0; k < per; ++k) {
        c.add_dialogue(make_dialogue("lo" + std::to_string(k), "lo", "x", turns));
        c.add_dialogue(make_dialogue("hi" + std::to_string(k), "hi", "x", turns));
    }
    return c;
}

std::vector<Utterance> slice(const Dialogue& d, std::size_t from, std::size_t to) {
    return {d.utterances.begin() + static_cast<long>(from), d.utterances.begin() + static_cast<long>(to)};
}

bool same_text(const std::vector<Utterance>& a, const std::vector<Utterance>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].text != b[i].text || a[i].role != b[i].role) return false;
    return true;
}

}  // namespace

TEST_CASE("chunk_dialogue counts") {
    const auto nine = chunk_dialogue(make_dialogue("d", "a", "b", 9), 3);
    REQUIRE(nine.size() == 3);
    for (const auto& c : nine) {
        CHECK(c.utterances.size() == 6);
        CHECK_FALSE(c.partial);
    }
    const auto ten = chunk_dialogue(make_dialogue("d", "a", "b", 10), 3);
    REQUIRE(ten.size() == 4);
    // 10 mod 3 leaves one turn.
    CHECK(ten[3].utterances.size() == 2);
    CHECK(ten[3].partial);
    CHECK(chunk_dialogue(make_dialogue("d", "a", "b", 7), 1).size() == 7);
    CHECK_THROWS_AS(chunk_dialogue(make_dialogue("d", "a", "b", 7), 0), Fault);
}

TEST_CASE("chunks keep alternation and cover the dialogue") {
    const auto d = make_dialogue("d", "a", "b", 8);
    std::vector<Utterance> joined;
    for (const auto& c : chunk_dialogue(d, 3)) {
        CHECK(c.utterances.front().role == corpus::Role::A);
        for (std::size_t i = 1; i < c.utterances.size(); ++i)
            CHECK(c.utterances[i].role != c.utterances[i - 1].role);
        joined.insert(joined.end(), c.utterances.begin(), c.utterances.end());
    }
    CHECK(joined == d.utterances);
}

TEST_CASE("interpolate_labels examples") {
    const auto mid = interpolate_labels(tv(0.2, 0.4, 0.6, 0.8, 1.0), tv(0.6, 0.4, 0.2, 0.0, 0.4), 0.5);
    const std::array<double, 5> want{0.4, 0.4, 0.4, 0.4, 0.7};
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::fabs(mid[i] - want[i]) < 1e-15);
    const auto y1 = tv(0.1, 0.3, 0.5, 0.7, 0.9);
    CHECK(interpolate_labels(y1, constant(0.2), 1.0) == y1);
    CHECK(interpolate_labels(constant(1.0), constant(0.0), 0.25) == constant(0.25));
    CHECK_THROWS_AS(interpolate_labels(y1, y1, 1.5), Fault);
    CHECK_THROWS_AS(interpolate_labels(y1, y1, -0.01), Fault);
}

TEST_CASE("interpolate_labels convexity over random inputs") {
    Rng rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto y1 = testutil::random_traits(rng);
        const auto y2 = testutil::random_traits(rng);
        const double beta = uniform01(rng);
        const auto y = interpolate_labels(y1, y2, beta);
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(y[i] >= std::min(y1[i], y2[i]));
            CHECK(y[i] <= std::max(y1[i], y2[i]));
        }
    }
}

TEST_CASE("fuse_with_mask forced mask selects chunks") {
    const auto d1 = make_dialogue("d1", "a", "b", 9, "one ");
    const auto d2 = make_dialogue("d2", "c", "e", 9, "two ");
    const auto f = fuse_with_mask(d1, d2, {1, 0, 1}, 3);
    REQUIRE(f.utterances.size() == 18);
    Dialogue out{"o", "", "", f.utterances};
    CHECK(same_text(slice(out, 0, 6), slice(d1, 0, 6)));
    CHECK(same_text(slice(out, 6, 12), slice(d2, 6, 12)));
    CHECK(same_text(slice(out, 12, 18), slice(d1, 12, 18)));
    for (std::size_t i = 0; i < f.utterances.size(); ++i) CHECK(f.utterances[i].index == i);
    CHECK_THROWS_AS(fuse_with_mask(d1, d2, {}, 3), Fault);
    CHECK_THROWS_AS(fuse_with_mask(d1, d2, {1, 1, 1, 1}, 3), Fault);
}

TEST_CASE("fuse_dialogues beta=1 returns D1 prefix and min chunk count") {
    const auto d1 = make_dialogue("d1", "a", "b", 10, "one ");
    const auto d2 = make_dialogue("d2", "c", "e", 6, "two ");
    Rng rng(3);
    const auto f = fuse_dialogues(d1, d2, 1.0, rng, 3);
    CHECK(f.mask == ChoiceMask{1, 1});
    CHECK(same_text(f.utterances, slice(d1, 0, 12)));
    const auto g = fuse_dialogues(d1, d2, 0.0, rng, 3);
    CHECK(g.mask == ChoiceMask{0, 0});
    CHECK(same_text(g.utterances, d2.utterances));
    Dialogue empty{"e", "a", "b", {}};
    CHECK_THROWS_AS(fuse_dialogues(d1, empty, 0.5, rng, 3), Fault);
}

TEST_CASE("fuse_dialogues Bernoulli fraction matches beta") {
    const auto d1 = make_dialogue("d1", "a", "b", 9);
    const auto d2 = make_dialogue("d2", "c", "e", 9);
    Rng rng(11);
    const int trials = 10000;
    double from_d1 = 0;
    for (int i = 0; i < trials; ++i) {
        const auto f = fuse_dialogues(d1, d2, 0.5, rng, 3);
        REQUIRE(f.mask.size() == 3);
        for (int m : f.mask) from_d1 += m;
    }
    // Binomial(30000, 0.5) has sd ~0.0029 in the fraction.
    CHECK(std::fabs(from_d1 / (3.0 * trials) - 0.5) <= 0.02);
}

TEST_CASE("fuse_monologues examples") {
    const auto m1 = corpus::monologue_of(make_dialogue("d1", "a", "b", 5, "one "), corpus::Role::A).utterances;
    const auto m2 = corpus::monologue_of(make_dialogue("d2", "c", "e", 3, "two "), corpus::Role::A).utterances;
    Rng rng(5);
    const auto f = fuse_monologues(m1, m2, 0.0, rng);
    CHECK(f.utterances.size() == 3);
    CHECK(same_text(f.utterances, m2));
    const auto g = fuse_monologues(m1, m2, 1.0, rng);
    CHECK(same_text(g.utterances, {m1.begin(), m1.begin() + 3}));
    CHECK_THROWS_AS(fuse_monologues(m1, {}, 0.5, rng), Fault);
}

TEST_CASE("synthesize: same-speaker labels equal the source label") {
    const auto c = testutil::ring_corpus(6, [](std::size_t) { return 3; }, 6, 2);
    AugmentOptions o;
    o.speaker_mode = SpeakerMode::SameSpeaker;
    o.count = 300;
    o.seed = 9;
    const auto samples = synthesize(c, pointers(c), o);
    std::set<std::array<double, 5>> labels;
    for (const auto& s : samples) {
        const auto& src = c.dialogue(s.provenance.src1);
        CHECK(c.dialogue(s.provenance.src2).speaker_a == src.speaker_a);
        CHECK(s.label == c.label_of(src));
        labels.insert(s.label.values());
    }
    CHECK(labels.size() <= 6);
}

TEST_CASE("synthesize: cross-speaker uniform beta gives a continuous label set") {
    const auto c = two_label_corpus(5, 6);
    AugmentOptions o;
    o.count = 10000;
    o.seed = 21;
    const auto uniform = synthesize(c, pointers(c), o);
    o.beta_mode = BetaMode::Fixed;
    o.beta0 = 0.5;
    const auto fixed = synthesize(c, pointers(c), o);
    for (std::size_t t = 0; t < 5; ++t) {
        std::set<double> u, f;
        for (const auto& s : uniform) u.insert(s.label[t]);
        for (const auto& s : fixed) f.insert(s.label[t]);
        CHECK(u.size() > 1000);
        CHECK(f.size() <= 3);
        for (double v : f) CHECK((v == 0.0 || v == 0.5 || v == 1.0));
        CHECK(u.size() > f.size());
    }
}

TEST_CASE("synthesize: convexity and chunk identity") {
    const auto c = testutil::ring_corpus(8, [](std::size_t i) { return 1 + i % 3; }, 7, 4);
    AugmentOptions o;
    o.count = 500;
    o.seed = 17;
    for (const auto& s : synthesize(c, pointers(c), o)) {
        const auto& d1 = c.dialogue(s.provenance.src1);
        const auto& d2 = c.dialogue(s.provenance.src2);
        const auto y1 = c.label_of(d1), y2 = c.label_of(d2);
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(s.label[i] >= std::min(y1[i], y2[i]));
            CHECK(s.label[i] <= std::max(y1[i], y2[i]));
        }
        const auto out = chunk_dialogue(s.dialogue, o.t);
        const auto c1 = chunk_dialogue(d1, o.t), c2 = chunk_dialogue(d2, o.t);
        REQUIRE(out.size() == s.provenance.mask.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            const auto& src = s.provenance.mask[i] ? c1[i] : c2[i];
            CHECK(same_text(out[i].utterances, src.utterances));
        }
        CHECK_NOTHROW(corpus::validate_dialogue(s.dialogue));
    }
}

TEST_CASE("synthesize: truncation length range and replay") {
    const auto c = testutil::ring_corpus(5, [](std::size_t) { return 2; }, 9, 8);
    AugmentOptions o;
    o.count = 400;
    o.seed = 33;
    o.truncate = true;
    std::set<std::size_t> lengths;
    const auto samples = synthesize(c, pointers(c), o);
    for (const auto& s : samples) {
        REQUIRE(s.provenance.trunc_turns.has_value());
        const auto k = *s.provenance.trunc_turns;
        CHECK(k >= 2);
        CHECK(k <= 9);
        CHECK(s.dialogue.n_turns() == k);
        lengths.insert(k);
        const auto again = replay(c, s.provenance, o.t, o.setting);
        CHECK(again.dialogue == s.dialogue);
        CHECK(again.label == s.label);
        CHECK(again.provenance == s.provenance);
    }
    CHECK(lengths.size() == 8);
}

TEST_CASE("synthesize: monologue setting") {
    const auto c = testutil::ring_corpus(4, [](std::size_t) { return 2; }, 5, 3);
    AugmentOptions o;
    o.count = 50;
    o.seed = 1;
    o.setting = Setting::Monologue;
    for (const auto& s : synthesize(c, pointers(c), o)) {
        CHECK(s.dialogue.monologue);
        CHECK(s.dialogue.utterances.size() == 5);
        for (const auto& u : s.dialogue.utterances) CHECK(u.role == corpus::Role::A);
        CHECK(replay(c, s.provenance, o.t, o.setting).dialogue == s.dialogue);
    }
}

TEST_CASE("synthesize: serial and parallel agree; seeds matter") {
    const auto c = testutil::ring_corpus(7, [](std::size_t) { return 2; }, 6, 5);
    AugmentOptions o;
    o.count = 200;
    o.seed = 44;
    o.truncate = true;
    const auto par = synthesize(c, pointers(c), o, Execution::Parallel);
    const auto ser = synthesize(c, pointers(c), o, Execution::Serial);
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].dialogue == ser[i].dialogue);
        CHECK(par[i].provenance == ser[i].provenance);
    }
    o.seed = 45;
    const auto other = synthesize(c, pointers(c), o, Execution::Serial);
    std::size_t differ = 0;
    for (std::size_t i = 0; i < par.size(); ++i) differ += !(other[i].provenance == par[i].provenance);
    CHECK(differ > 150);
}

TEST_CASE("synthesize: errors") {
    Corpus solo;
    solo.add_speaker({"a", constant(0.3)});
    solo.add_speaker({"b", constant(0.6)});
    solo.add_dialogue(make_dialogue("d1", "a", "b", 4));
    solo.add_dialogue(make_dialogue("d2", "a", "b", 4));
    AugmentOptions o;
    o.count = 3;
    CHECK_THROWS_WITH_AS(synthesize(solo, pointers(solo), o), doctest::Contains("2 distinct"), Fault);
    o.speaker_mode = SpeakerMode::SameSpeaker;
    CHECK(synthesize(solo, pointers(solo), o).size() == 3);
    o.beta_mode = BetaMode::Fixed;
    o.beta0 = 1.2;
    CHECK_THROWS_AS(synthesize(solo, pointers(solo), o), Fault);
    o.beta0 = 0.5;
    o.t = 0;
    CHECK_THROWS_AS(synthesize(solo, pointers(solo), o), Fault);
    o.t = 3;
    o.truncate = true;
    o.t_min = 1;
    CHECK_THROWS_AS(synthesize(solo, pointers(solo), o), Fault);
}

TEST_CASE("to_corpus and provenance round-trip") {
    const auto c = testutil::ring_corpus(5, [](std::size_t) { return 2; }, 6, 6);
    AugmentOptions o;
    o.count = 40;
    o.seed = 2;
    o.truncate = true;
    o.t_min = 3;
    const auto samples = synthesize(c, pointers(c), o);
    const auto syn = to_corpus(samples);
    CHECK(syn.dialogues().size() == 40);
    CHECK(syn.speakers().size() == 80);
    for (const auto& s : samples) {
        CHECK(syn.label_of(syn.dialogue(s.provenance.syn_id)) == s.label);
        CHECK_FALSE(syn.speaker(s.dialogue.speaker_b).traits.has_value());
    }
    std::stringstream corpus_io;
    corpus::write_corpus(syn, corpus_io);
    CHECK(corpus::read_corpus(corpus_io) == syn);

    std::stringstream ss;
    write_provenance(samples, ss);
    const auto back = read_provenance(ss);
    REQUIRE(back.size() == samples.size());
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == samples[i].provenance);

    std::stringstream bad("{\"syn_id\":\"x\"}\n");
    CHECK_THROWS_WITH_AS(read_provenance(bad), doctest::Contains("line 1"), Fault);
}
