// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hcgnn/augment/augment.hpp"
#include "hcgnn/corpus/analysis.hpp"
#include "hcgnn/corpus/split.hpp"
#include "hcgnn/experiment/config.hpp"
#include "hcgnn/experiment/data.hpp"
#include "hcgnn/experiment/metrics.hpp"
#include "hcgnn/experiment/synth.hpp"
#include "hcgnn/experiment/train.hpp"
#include "hcgnn/model/layers.hpp"
#include "hcgnn/model/model.hpp"
#include "oracle/corpus_fixtures.hpp"
#include "oracle/dense_model.hpp"
#include "oracle/gradcheck_util.hpp"
#include "oracle/metrics_oracle.hpp"

using namespace hcgnn;
using namespace hcgnn::model;
using diff::ParamStore;
using diff::Tape;
using diff::Tensor;
using graph::ConvGraph;
using graph::Relation;
using graph::Role;
using testutil::random_tensor;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int g_failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double median3(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

constexpr std::array<Variant, 5> kVariants{Variant::HCGNN, Variant::MLP, Variant::GCN, Variant::GAT,
                                           Variant::RGCN};

void randomize(Model& m, std::uint64_t seed) {
    Rng rng(seed);
    for (auto& p : m.params()) p.tensor = random_tensor(rng, p.tensor.shape());
    for (auto& p : m.params())
        if (p.name.ends_with(".b2")) p.tensor[0] = 0.3 + 0.7 * uniform01(rng);
}

ModelConfig small_config(Variant v) {
    ModelConfig c;
    c.variant = v;
    c.d = 4;
    c.d_prime = 3;
    c.d_dprime = 3;
    return c;
}

double max_abs_diff(const std::vector<double>& a, std::span<const double> b) {
    if (a.size() != b.size()) return INFINITY;
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

double max_abs_diff(const dense::Mat& a, const Tensor& b) {
    std::vector<double> flat;
    for (const auto& r : a) flat.insert(flat.end(), r.begin(), r.end());
    return max_abs_diff(flat, b.values());
}

// 1
void gradient_integrity() {
    const auto t0 = Clock::now();
    const auto d = testutil::make_dialogue("d", "a", "b", 3);
    double worst = 0;
    for (auto v : kVariants) {
        ModelConfig cfg;
        cfg.variant = v;
        cfg.d = 6;
        cfg.d_prime = 5;
        cfg.d_dprime = 4;
        Model m(cfg);
        randomize(m, 31 + static_cast<std::uint64_t>(v));
        Rng rng(17);
        const GraphInput in{random_tensor(rng, {6, cfg.d}), graph::build_graph(d, cfg.relations, cfg.window)};
        const auto y = random_tensor(rng, {1, 5}, 0, 1);
        const auto r = testutil::check_gradients(
            [&](Tape& tape, const ParamStore& ps) {
                const Model local(cfg, ps);
                return mae_loss(local.forward(tape, in), tape.constant(y));
            },
            m.params());
        worst = std::max(worst, r.max_rel_error);
    }
    const double secs = seconds_since(t0);
    report(1, worst <= 1e-4 && secs < 120.0,
           "max rel error " + fmt("%.2e", worst) + " over 5 variants, " + fmt("%.1f", secs) + " s");
}

// 2
void dense_oracle() {
    Rng rng(2024);
    double worst = 0;
    auto roles_of = [&](std::size_t n) {
        std::vector<Role> r(n);
        for (auto& x : r) x = uniform01(rng) < 0.5 ? Role::A : Role::B;
        r[uniform_index(rng, n)] = Role::A;
        return r;
    };
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = 1 + uniform_index(rng, 8);
        const auto w = 1 + uniform_index(rng, 3);
        const ConvGraph g(roles_of(n), {Relation::AA, Relation::BA}, w);
        const auto x = random_tensor(rng, {n, 4});
        const auto xm = dense::from(x);
        for (auto v : kVariants)
            for (bool scaling : {true, false})
                for (auto ro : {Readout::MeanAll, Readout::MeanSpeakerA}) {
                    auto cfg = small_config(v);
                    cfg.neighbor_scaling = scaling;
                    cfg.readout = ro;
                    cfg.window = w;
                    Model m(cfg);
                    randomize(m, rng());
                    worst = std::max(worst, max_abs_diff(dense::ModelOracle(m).forward(xm, g), m.predict({x, g})));
                }
        Model m(small_config(Variant::HCGNN));
        randomize(m, rng());
        const dense::ModelOracle o(m);
        Tape tape;
        const auto h = tape.constant(x);
        auto param = [&](const std::string& name) { return tape.param(m.params(), m.params().find(name)); };
        for (auto r : {Relation::AA, Relation::BA}) {
            const std::string rel = graph::relation_name(r);
            const auto& nb = g.neighbor_lists(r);
            const auto adj = dense::adjacency(g, r);
            AttnVars av;
            for (std::size_t k = 0; k < 2; ++k) {
                av.w_score.push_back(param(rel + ".attn.k" + std::to_string(k) + ".W"));
                av.a.push_back(param(rel + ".attn.k" + std::to_string(k) + ".a"));
            }
            av.w_r = param(rel + ".attn.Wr");
            av.w_0 = param(rel + ".attn.W0");
            const auto a1 = attn_layer(h, nb, av, true, 0.2);
            const auto ref1 = dense::attn_layer(xm, adj, o.attn(rel + ".attn"), true, 0.2);
            worst = std::max(worst, max_abs_diff(ref1, a1.value()));
            const auto c1 = graphconv(a1, nb, param(rel + ".conv1.W"), param(rel + ".conv1.W0"));
            worst = std::max(worst, max_abs_diff(dense::graphconv(ref1, adj, o.p(rel + ".conv1.W"),
                                                                  o.p(rel + ".conv1.W0")),
                                                 c1.value()));
        }
        std::vector<diff::Var> toks;
        dense::Mat tm;
        for (int k = 0; k < 3; ++k) {
            const auto t = random_tensor(rng, {1, 3});
            toks.push_back(tape.constant(t));
            tm.push_back(dense::from(t)[0]);
        }
        const FusionVars fv{param("fusion.Wq"), param("fusion.Wk"), param("fusion.Wv")};
        worst = std::max(worst, max_abs_diff(dense::fuse(tm, o.p("fusion.Wq"), o.p("fusion.Wk"), o.p("fusion.Wv")),
                                             fuse_relations(toks, fv).value().values()));
    }
    report(2, worst <= 1e-10, "max abs deviation " + fmt("%.2e", worst) + " on 50 graphs");
}

// 3
void fusion_properties() {
    bool ok = true;
    std::string why;
    auto fail = [&](const std::string& s) {
        ok = false;
        if (why.empty()) why = s;
    };
    exp::SynthSpec spec;
    spec.n_speakers = 40;
    spec.n_pairs = 400;
    spec.seed = 3;
    const auto syn = exp::generate_synthetic_corpus(spec);
    const auto& c = syn.corpus;
    const auto& d1 = c.dialogues()[0];
    const auto& d2 = c.dialogues()[1];
    Rng rng(1);
    const auto f = augment::fuse_dialogues(d1, d2, 1.0, rng, 3);
    const auto l = std::min(augment::chunk_dialogue(d1, 3).size(), augment::chunk_dialogue(d2, 3).size());
    const std::size_t take = std::min(d1.utterances.size(), l * 6);
    if (f.utterances.size() != take ||
        !std::equal(f.utterances.begin(), f.utterances.end(), d1.utterances.begin()))
        fail("beta=1 is not D1's chunk prefix");
    if (augment::interpolate_labels(c.label_of(d1), c.label_of(d2), 1.0) != c.label_of(d1))
        fail("beta=1 label differs from y1");

    std::vector<const corpus::Dialogue*> train;
    for (const auto& d : c.dialogues()) train.push_back(&d);
    augment::AugmentOptions o;
    o.count = 10000;
    o.seed = 5;
    o.truncate = true;
    const auto cross = augment::synthesize(c, train, o);
    std::size_t replay_mismatch = 0;
    for (std::size_t k = 0; k < cross.size(); k += 50) {
        const auto r = augment::replay(c, cross[k].provenance, o.t, o.setting);
        if (!(r.dialogue == cross[k].dialogue) || std::memcmp(r.label.values().data(), cross[k].label.values().data(),
                                                              sizeof(double) * 5) != 0)
            ++replay_mismatch;
    }
    if (replay_mismatch) fail("replay mismatch");
    std::size_t min_cross = SIZE_MAX;
    for (std::size_t t = 0; t < 5; ++t) {
        std::set<double> s;
        for (const auto& x : cross) s.insert(x.label[t]);
        min_cross = std::min(min_cross, s.size());
    }
    if (min_cross <= 1000) fail("too few distinct cross-speaker labels");
    o.speaker_mode = augment::SpeakerMode::SameSpeaker;
    const auto same = augment::synthesize(c, train, o);
    std::size_t max_same = 0;
    for (std::size_t t = 0; t < 5; ++t) {
        std::set<double> s;
        for (const auto& x : same) s.insert(x.label[t]);
        max_same = std::max(max_same, s.size());
    }
    std::set<std::string> initiators;
    for (const auto* d : train) initiators.insert(d->speaker_a);
    if (max_same > initiators.size()) fail("same-speaker labels exceed speaker count");
    report(3, ok,
           (why.empty() ? std::string() : why + "; ") + "beta=1 prefix ok, replay of 200 samples, distinct labels " +
               std::to_string(min_cross) + " (cross, min over traits), " + std::to_string(max_same) +
               " (same, <= " + std::to_string(initiators.size()) + " speakers)");
}

// 4
void split_properties() {
    bool ok = true;
    std::string detail;
    for (std::size_t n : {10u, 50u, 233u}) {
        exp::SynthSpec spec;
        spec.n_speakers = n;
        spec.n_pairs = 4 * n + 7;
        spec.turns_min = 2;
        spec.turns_max = 3;
        spec.seed = n;
        const auto syn = exp::generate_synthetic_corpus(spec);
        corpus::SplitOptions so;
        so.seed = 11;
        const auto s = corpus::speaker_split(syn.corpus, so);
        const double best = *std::min_element(s.trial_deviations.begin(), s.trial_deviations.end());
        const bool minimal = s.deviation == best && s.trial_deviations.size() == 100;
        std::set<std::string> seen;
        std::size_t overlap = 0;
        for (auto p : {corpus::Partition::Train, corpus::Partition::Valid, corpus::Partition::Test})
            for (const auto& id : s.ids(p))
                if (!seen.insert(id).second) ++overlap;
        std::set<std::string> init;
        for (const auto& d : syn.corpus.dialogues()) init.insert(d.speaker_a);
        const bool covered = seen == init;
        ok = ok && minimal && overlap == 0 && covered;
        detail += std::to_string(n) + " speakers: deviation " + fmt("%.4f", s.deviation) + (minimal ? " (min)" : " (NOT min)") +
                  ", overlap " + std::to_string(overlap) + "; ";
    }
    report(4, ok, detail);
}

// 5
void metric_oracles() {
    Rng rng(5);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = 3 + uniform_index(rng, 60);
        std::vector<exp::TraitArray> pred(n), truth(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t t = 0; t < 5; ++t) {
                pred[i][t] = uniform01(rng);
                truth[i][t] = std::round(uniform01(rng) * 8.0) / 8.0;
            }
        exp::TraitArray th{};
        for (auto& v : th) v = 0.2 + 0.6 * uniform01(rng);
        const auto rep = exp::compute_metrics(pred, truth, th);
        for (std::size_t t = 0; t < 5; ++t) {
            std::vector<double> p, y;
            std::vector<int> pb, yb;
            for (std::size_t i = 0; i < n; ++i) {
                p.push_back(pred[i][t]);
                y.push_back(truth[i][t]);
                pb.push_back(pred[i][t] > th[t]);
                yb.push_back(truth[i][t] > th[t]);
            }
            const auto& m = rep.traits[t];
            worst = std::max(worst, std::fabs(m.accuracy - oracle::accuracy(pb, yb)));
            worst = std::max(worst, std::fabs(m.balanced_accuracy - oracle::balanced_accuracy(pb, yb)));
            if (!m.pearson || !m.spearman) {
                worst = INFINITY;
                continue;
            }
            const auto op = oracle::pearson(p, y), os = oracle::spearman(p, y);
            worst = std::max({worst, std::fabs(m.pearson->r - op.r), std::fabs(m.pearson->p - op.p),
                              std::fabs(m.spearman->r - os.r), std::fabs(m.spearman->p - os.p)});
        }
    }
    std::vector<int> truth(100, 0), pred(100, 1);
    std::fill(truth.begin(), truth.begin() + 90, 1);
    const double ba = exp::balanced_accuracy(pred, truth);
    report(5, worst <= 1e-12 && ba == 0.5,
           "max deviation " + fmt("%.2e", worst) + " on 100 pairs; 90/10 all-positive balanced accuracy " + fmt("%.17g", ba));
}

// 6
void calibration() {
    exp::SynthSpec spec;
    spec.n_speakers = 5000;
    spec.n_pairs = 1;
    spec.turns_min = 1;
    spec.turns_max = 1;
    spec.seed = 6;
    const auto syn = exp::generate_synthetic_corpus(spec);
    const auto corr = corpus::trait_correlations(syn.corpus.speakers());
    double worst = 0;
    std::string detail;
    for (std::size_t i = 0; i < 10; ++i) {
        worst = std::max(worst, std::fabs(corr[i].r - exp::kReferenceCorrelations[i]));
        detail += std::string(corpus::kTraitNames[static_cast<std::size_t>(corr[i].first)]) +
                  corpus::kTraitNames[static_cast<std::size_t>(corr[i].second)] + " " + fmt("%+.3f", corr[i].r) + " ";
    }
    report(6, worst <= 0.10, "max |r - target| " + fmt("%.3f", worst) + ": " + detail);
}

// Experiment harness for 7-10.

struct RunSpec {
    exp::SynthSpec synth;
    ModelConfig model;
    exp::TrainConfig train = exp::TrainConfig::desk();
    std::size_t keep_train_speakers = 0;  // 0 keeps the whole partition
    std::size_t augment_count = 0;
    bool truncate = false;
    bool shuffle_labels = false;
    std::optional<std::size_t> eval_k;
};

struct RunResult {
    double full = 0.0;
    double at_k = 0.0;
    double seconds = 0.0;
    std::size_t n_train = 0;
};

/// Permutes labels across the speakers of a set; each speaker keeps one
/// label for all of its dialogues.
void shuffle_labels(std::vector<exp::Example>& set, std::uint64_t seed) {
    std::map<std::string, exp::TraitArray> original;
    for (const auto& e : set) original[e.speaker] = e.label;
    std::vector<std::string> perm;
    for (const auto& [id, lab] : original) perm.push_back(id);
    Rng rng(seed);
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
    std::map<std::string, exp::TraitArray> moved;
    std::size_t i = 0;
    for (const auto& [id, lab] : original) moved[id] = original[perm[i++]];
    for (auto& e : set) e.label = moved[e.speaker];
}

RunResult run(const RunSpec& rs, std::uint64_t seed) {
    const auto t0 = Clock::now();
    auto spec = rs.synth;
    spec.seed = seed;
    auto mc = rs.model;
    mc.init_seed = seed;
    auto tc = rs.train;
    tc.seed = seed;
    const auto syn = exp::generate_synthetic_corpus(spec);
    corpus::SplitOptions so;
    so.seed = seed;
    auto split = corpus::speaker_split(syn.corpus, so);
    if (rs.keep_train_speakers && rs.keep_train_speakers < split.train.size())
        split.train.resize(rs.keep_train_speakers);
    embed::EncoderSpec es;
    es.dim = mc.d;
    const exp::Featurizer f(es);
    const auto tr = corpus::dialogues_in(syn.corpus, split, corpus::Partition::Train);
    const auto va = corpus::dialogues_in(syn.corpus, split, corpus::Partition::Valid);
    const auto te = corpus::dialogues_in(syn.corpus, split, corpus::Partition::Test);
    auto train = exp::build_examples(syn.corpus, tr, f, mc);
    const auto thresholds = exp::median_thresholds(exp::labels_of(train));
    if (rs.shuffle_labels) shuffle_labels(train, sub_seed(seed, 99));
    corpus::Corpus aug;
    if (rs.augment_count) {
        augment::AugmentOptions o;
        o.count = rs.augment_count;
        o.seed = seed;
        o.truncate = rs.truncate;
        aug = augment::to_corpus(augment::synthesize(syn.corpus, tr, o));
        std::vector<const corpus::Dialogue*> ad;
        for (const auto& d : aug.dialogues()) ad.push_back(&d);
        for (auto& e : exp::build_examples(aug, ad, f, mc)) train.push_back(std::move(e));
    }
    auto valid = exp::build_examples(syn.corpus, va, f, mc);
    if (rs.shuffle_labels) shuffle_labels(valid, sub_seed(seed, 100));
    const auto test = exp::build_examples(syn.corpus, te, f, mc);
    const auto r = exp::train(mc, train, valid, tc);
    const Model m(r.checkpoint.config, r.checkpoint.params);
    RunResult out;
    out.full = 100.0 * exp::evaluate(m, test, thresholds).avg_balanced_accuracy;
    if (rs.eval_k) {
        const auto tk = exp::build_examples(syn.corpus, te, f, mc, rs.eval_k);
        out.at_k = 100.0 * exp::evaluate(m, tk, thresholds).avg_balanced_accuracy;
    }
    out.n_train = train.size();
    out.seconds = seconds_since(t0);
    return out;
}

// 7
void learnability() {
    RunSpec rs;  // default corpus, d=32, desk preset
    const auto hc = run(rs, 1);
    rs.shuffle_labels = true;
    const auto sh = run(rs, 1);
    report(7, hc.full >= 75.0 && hc.seconds < 600.0 && sh.full <= 55.0,
           "HC-GNN " + fmt("%.1f", hc.full) + "% in " + fmt("%.0f", hc.seconds) + " s; label-shuffled control " +
               fmt("%.1f", sh.full) + "%");
}

// 8
void heterogeneity() {
    RunSpec rs;
    rs.synth.n_speakers = 600;
    rs.synth.n_pairs = 1800;
    rs.synth.turns_min = 5;
    rs.synth.signal = 0.3;
    rs.synth.influence = -0.5;
    std::vector<double> gaps;
    std::string detail;
    for (std::uint64_t seed : {1, 2, 3}) {
        rs.model.variant = Variant::HCGNN;
        const auto hc = run(rs, seed);
        rs.model.variant = Variant::GCN;
        const auto gcn = run(rs, seed);
        gaps.push_back(hc.full - gcn.full);
        detail += "seed " + std::to_string(seed) + ": HC-GNN " + fmt("%.1f", hc.full) + " GCN " + fmt("%.1f", gcn.full) + "; ";
    }
    const double mean = (gaps[0] + gaps[1] + gaps[2]) / 3.0;
    report(8, mean >= 5.0, "mean gap " + fmt("%.1f", mean) + " points (" + detail + ")");
}

// 9
void augmentation_gain() {
    RunSpec rs;
    rs.keep_train_speakers = 20;
    std::vector<double> gains;
    std::string detail;
    for (std::uint64_t seed : {1, 2, 3}) {
        rs.augment_count = 0;
        const auto base = run(rs, seed);
        rs.augment_count = 10 * base.n_train;
        const auto aug = run(rs, seed);
        gains.push_back(aug.full - base.full);
        detail += "seed " + std::to_string(seed) + ": " + fmt("%.1f", base.full) + " -> " + fmt("%.1f", aug.full) + "; ";
    }
    const double med = median3(gains);
    report(9, med >= 3.0, "median gain " + fmt("%.1f", med) + " points (" + detail + ")");
}

// 10
void truncation() {
    RunSpec rs;
    rs.synth.signal = 0.9;
    rs.synth.markers_per_trait = 50;
    rs.augment_count = 2000;
    rs.eval_k = 2;
    std::vector<double> within, better;
    std::string detail;
    for (std::uint64_t seed : {1, 2, 3}) {
        rs.truncate = true;
        const auto tr = run(rs, seed);
        rs.truncate = false;
        const auto full_only = run(rs, seed);
        within.push_back(tr.full - tr.at_k);
        better.push_back(tr.at_k - full_only.at_k);
        detail += "seed " + std::to_string(seed) + ": truncation-trained full " + fmt("%.1f", tr.full) + " k=2 " +
                  fmt("%.1f", tr.at_k) + ", full-context-trained k=2 " + fmt("%.1f", full_only.at_k) + "; ";
    }
    const double w = median3(within), b = median3(better);
    report(10, w <= 5.0 && b > 0.0,
           "median full-k2 gap " + fmt("%.1f", w) + ", median k=2 advantage " + fmt("%.1f", b) + " (" + detail + ")");
}

// 11
void reproducibility() {
    exp::SynthSpec spec;
    spec.n_speakers = 60;
    spec.n_pairs = 300;
    spec.seed = 4;
    const auto syn = exp::generate_synthetic_corpus(spec);
    corpus::SplitOptions so;
    so.seed = 4;
    const auto split = corpus::speaker_split(syn.corpus, so);
    const ModelConfig mc;
    const exp::Featurizer f(embed::EncoderSpec{});
    auto part = [&](corpus::Partition p) {
        return exp::build_examples(syn.corpus, corpus::dialogues_in(syn.corpus, split, p), f, mc);
    };
    const auto train = part(corpus::Partition::Train), valid = part(corpus::Partition::Valid),
               test = part(corpus::Partition::Test);
    auto tc = exp::TrainConfig::desk();
    tc.seed = 8;
    tc.max_epochs = 6;
    const auto a = exp::train(mc, train, valid, tc, Execution::Parallel);
    const auto b = exp::train(mc, train, valid, tc, Execution::Parallel);
    const auto s = exp::train(mc, train, valid, tc, Execution::Serial);
    const bool logs = a.log.to_text() == b.log.to_text() && a.log.to_text() == s.log.to_text();
    std::stringstream buf;
    model::write_checkpoint(a.checkpoint, buf);
    const auto back = model::read_checkpoint(buf);
    bool bits = back == a.checkpoint && back.params.size() == a.checkpoint.params.size();
    for (std::size_t i = 0; bits && i < back.params.size(); ++i) {
        const auto& x = back.params[i].tensor;
        const auto& y = a.checkpoint.params[i].tensor;
        bits = x.size() == y.size() && std::memcmp(x.values().data(), y.values().data(), x.size() * sizeof(double)) == 0;
    }
    const auto th = exp::median_thresholds(exp::labels_of(train));
    const Model m1(a.checkpoint.config, a.checkpoint.params), m2(back.config, back.params);
    const auto p1 = exp::predict_all(m1, test), p2 = exp::predict_all(m2, test);
    const bool eval = p1 == p2 && exp::evaluate(m1, test, th) == exp::evaluate(m2, test, th);
    report(11, logs && bits && eval,
           std::string("logs ") + (logs ? "identical" : "differ") + " (" + std::to_string(a.log.epochs.size()) +
               " epochs, serial and parallel); checkpoint round-trip " + (bits ? "bit-exact" : "differs") + "; eval " +
               (eval ? "identical" : "differs") + " after reload");
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> criteria{gradient_integrity, dense_oracle,      fusion_properties,
                                                      split_properties,   metric_oracles,    calibration,
                                                      learnability,       heterogeneity,     augmentation_gain,
                                                      truncation,         reproducibility};
    const auto t0 = Clock::now();
    for (const auto& c : criteria) {
        try {
            c();
        } catch (const std::exception& e) {
            std::printf("error: %s\n", e.what());
            ++g_failures;
        }
    }
    std::printf("%d of 11 criteria failed, %.0f s total\n", g_failures, seconds_since(t0));
    return g_failures == 0 ? 0 : 1;
}
