#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "hcgnn/corpus/analysis.hpp"
#include "hcgnn/corpus/corpus.hpp"
#include "hcgnn/corpus/split.hpp"
#include "hcgnn/diffcore/error.hpp"
#include "oracle/corpus_fixtures.hpp"

using namespace hcgnn;
using namespace hcgnn::corpus;

TEST_CASE("normalize_trait anchors and grid") {
    CHECK(normalize_trait(1) == 0.0);
    CHECK(normalize_trait(7) == 1.0);
    CHECK(normalize_trait(4) == 0.5);
    double prev = -1;
    for (int raw = 1; raw <= 7; ++raw) {
        const double v = normalize_trait(raw);
        CHECK(v > prev);
        CHECK(std::fabs(v - (raw - 1) / 6.0) < 1e-15);
        prev = v;
    }
    CHECK_THROWS_WITH_AS(normalize_trait(7.5, Trait::O), doctest::Contains("O"), Fault);
    CHECK_THROWS_AS(normalize_trait(0.9), Fault);
}

TEST_CASE("load_corpus parses speakers and dialogues") {
    std::istringstream in(
        R"({"type":"speaker","id":"x","traits_raw":[1,2,3,4,7]})"
        "\n"
        R"({"type":"speaker","id":"y","traits":[0.1,0.2,0.3,0.4,0.5]})"
        "\n"
        R"({"type":"dialogue","id":"d1","speaker_a":"x","speaker_b":"y","utterances":[{"role":"A","text":"hi"},{"role":"B","text":"yo"},{"role":"A","text":"so"},{"role":"B","text":"ok"}]})"
        "\n");
    auto c = read_corpus(in);
    REQUIRE(c.dialogues().size() == 1);
    CHECK(c.dialogues()[0].utterances.size() == 4);
    CHECK(c.dialogues()[0].n_turns() == 2);
    CHECK(c.speaker("x").traits->values()[1] == doctest::Approx(1.0 / 6.0));
    CHECK(c.speaker("x").traits->values()[4] == 1.0);
}

TEST_CASE("empty file gives an empty corpus") {
    std::istringstream in("");
    auto c = read_corpus(in);
    CHECK(c.speakers().empty());
    CHECK(c.dialogues().empty());
}

TEST_CASE("load_corpus faults carry line numbers") {
    auto fails_with = [](const std::string& text, const std::string& needle) {
        std::istringstream in(text);
        CHECK_THROWS_WITH_AS(read_corpus(in), doctest::Contains(needle.c_str()), Fault);
    };
    const std::string spk = R"({"type":"speaker","id":"x","traits":[0,0,0,0,0]})"
                            "\n";
    fails_with(spk + "{not json\n", "line 2");
    fails_with(spk + spk, "duplicate speaker id");
    fails_with(spk + R"({"type":"dialogue","id":"d","speaker_a":"x","speaker_b":"zz","utterances":[]})" "\n",
               "unknown speaker 'zz'");
    fails_with(spk + R"({"type":"speaker","id":"y","traits":[0,0,0,0,0]})" "\n" +
                   R"({"type":"dialogue","id":"d","speaker_a":"x","speaker_b":"y","utterances":[{"role":"A","text":"1"},{"role":"A","text":"2"}]})" "\n",
               "alternate");
    fails_with(R"({"type":"speaker","id":"x","traits_raw":[0,1,1,1,1]})" "\n", "line 1");
}

TEST_CASE("save then load is the identity") {
    Rng rng(5);
    auto c = testutil::ring_corpus(6, [](std::size_t i) { return 1 + i % 3; }, 4);
    Corpus with_odd = c;
    Dialogue trunc = testutil::make_dialogue("t", "s0", "s1", 3);
    trunc.utterances.pop_back();
    trunc.truncated = true;
    with_odd.add_dialogue(trunc);
    with_odd.add_speaker(Speaker{"syn-b", std::nullopt});
    std::stringstream buf;
    write_corpus(with_odd, buf);
    auto back = read_corpus(buf);
    CHECK(back == with_odd);
}

TEST_CASE("truncate_to_turns and to_monologue") {
    auto d = testutil::make_dialogue("d", "a", "b", 15);
    CHECK(truncate_to_turns(d, 2).utterances.size() == 4);
    CHECK(truncate_to_turns(d, 2).truncated);
    CHECK(truncate_to_turns(d, 10).utterances.size() == 20);
    CHECK(truncate_to_turns(d, 15) == d);
    CHECK(truncate_to_turns(d, 40) == d);
    CHECK_THROWS_AS(truncate_to_turns(d, 0), Fault);

    auto three = testutil::make_dialogue("e", "a", "b", 3);
    auto ma = to_monologue(three, Role::A);
    auto mb = to_monologue(three, Role::B);
    REQUIRE(ma.size() == 3);
    CHECK(ma[0].index == 0);
    CHECK(ma[1].index == 2);
    CHECK(ma[2].index == 4);
    CHECK(mb[2].index == 5);
    CHECK(to_monologue(Dialogue{"z", "a", "b", {}, false, false}, Role::A).empty());

    auto m = monologue_of(three, Role::B);
    CHECK(m.monologue);
    CHECK(m.speaker_a == "b");
    CHECK(m.utterances[1].index == 1);
    CHECK(m.utterances[1].role == Role::A);
    CHECK_NOTHROW(validate_dialogue(m));
}

TEST_CASE("trait_correlations on affine columns and invariances") {
    std::vector<Speaker> speakers;
    for (int i = 0; i < 6; ++i) {
        const double x = 0.1 * i;
        speakers.push_back({"s" + std::to_string(i),
                            TraitVector({x, 0.5 * x + 0.1, 1.0 - x, 0.3 + 0.05 * (i % 2), x * x})});
    }
    auto r = trait_correlations(speakers);
    CHECK(r[0].first == Trait::N);
    CHECK(r[0].second == Trait::E);
    CHECK(r[0].r == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r[1].r == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r[9].first == Trait::A);
    CHECK(r[9].second == Trait::C);

    Rng rng(8);
    std::vector<Speaker> sample, rescaled;
    for (int i = 0; i < 50; ++i) {
        auto t = testutil::random_traits(rng);
        sample.push_back({"s" + std::to_string(i), t});
        std::array<double, 5> v = t.values();
        for (std::size_t k = 0; k < 5; ++k) v[k] = 0.1 + 0.5 * v[k] * (0.4 + 0.1 * k);
        rescaled.push_back({"s" + std::to_string(i), TraitVector(v)});
    }
    auto a = trait_correlations(sample), b = trait_correlations(rescaled);
    for (std::size_t k = 0; k < 10; ++k) CHECK(std::fabs(a[k].r - b[k].r) <= 1e-12);

    std::vector<Speaker> flat(speakers);
    for (auto& s : flat) {
        auto v = s.traits->values();
        v[2] = 0.4;
        s.traits = TraitVector(v);
    }
    CHECK_THROWS_WITH_AS(trait_correlations(flat), doctest::Contains("trait O"), Fault);
    CHECK_THROWS_AS(trait_correlations({speakers[0], speakers[1]}), Fault);
}

namespace {

std::array<double, 3> recomputed_proportions(const Corpus& c, const SplitAssignment& s) {
    std::array<double, 3> n{};
    for (const auto& d : c.dialogues()) n[static_cast<std::size_t>(s.partition_of(d.speaker_a))] += 1;
    const double total = n[0] + n[1] + n[2];
    for (auto& x : n) x /= total;
    return n;
}

void check_disjoint(const SplitAssignment& s) {
    std::set<std::string> seen;
    for (const auto* v : {&s.train, &s.valid, &s.test})
        for (const auto& id : *v) CHECK(seen.insert(id).second);
}

}  // namespace

TEST_CASE("10 speakers with one dialogue each split 8:1:1 exactly") {
    auto c = testutil::ring_corpus(10, [](std::size_t) { return 1; }, 2);
    auto s = speaker_split(c, {{8, 1, 1}, 100, 42});
    CHECK(s.train.size() == 8);
    CHECK(s.valid.size() == 1);
    CHECK(s.test.size() == 1);
    CHECK(s.deviation < 1e-12);
    check_disjoint(s);
    auto again = speaker_split(c, {{8, 1, 1}, 100, 42});
    CHECK(again.train == s.train);
    CHECK(again.valid == s.valid);
    CHECK(again.test == s.test);
}

TEST_CASE("chosen split minimizes the L1 deviation over all trials") {
    auto c = testutil::ring_corpus(233, [](std::size_t i) { return 1 + (i * i) % 17; }, 1);
    auto s = speaker_split(c, {{8, 1, 1}, 100, 7});
    REQUIRE(s.trial_deviations.size() == 100);
    check_disjoint(s);

    // Independent recomputation from the returned ids.
    auto prop = recomputed_proportions(c, s);
    const double dev = std::fabs(prop[0] - 0.8) + std::fabs(prop[1] - 0.1) + std::fabs(prop[2] - 0.1);
    CHECK(std::fabs(dev - s.deviation) < 1e-12);
    for (double d : s.trial_deviations) CHECK(s.deviation <= d);

    // Trial k of a 100-trial run equals the single best of a k-trial run.
    double running = 1e9;
    for (std::size_t k = 1; k <= 100; k += 11) {
        auto sk = speaker_split(c, {{8, 1, 1}, k, 7});
        for (std::size_t i = 0; i < k; ++i) CHECK(sk.trial_deviations[i] == s.trial_deviations[i]);
        CHECK(sk.deviation <= running);
        running = sk.deviation;
    }
}

TEST_CASE("splits are disjoint for every seed") {
    auto c = testutil::ring_corpus(50, [](std::size_t i) { return 1 + i % 4; }, 1);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto s = speaker_split(c, {{8, 1, 1}, 5, seed});
        check_disjoint(s);
        CHECK(s.train.size() + s.valid.size() + s.test.size() == 50);
    }
}

TEST_CASE("split faults with too few initiating speakers") {
    auto c = testutil::ring_corpus(2, [](std::size_t) { return 3; }, 1);
    CHECK_THROWS_AS(speaker_split(c, {}), Fault);
}
