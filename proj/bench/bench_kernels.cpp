// Serial reference versus OpenMP path for the parallel kernels.

#include <benchmark/benchmark.h>

#include "hcgnn/augment/augment.hpp"
#include "hcgnn/corpus/split.hpp"
#include "hcgnn/experiment/data.hpp"
#include "hcgnn/experiment/synth.hpp"
#include "hcgnn/experiment/train.hpp"

using namespace hcgnn;

namespace {

Execution exec_of(const benchmark::State& st) { return st.range(0) ? Execution::Parallel : Execution::Serial; }

const exp::SynthResult& fixture() {
    static const exp::SynthResult syn = [] {
        exp::SynthSpec s;
        s.n_speakers = 100;
        s.n_pairs = 400;
        s.seed = 1;
        return exp::generate_synthetic_corpus(s);
    }();
    return syn;
}

std::vector<const corpus::Dialogue*> all_dialogues() {
    std::vector<const corpus::Dialogue*> out;
    for (const auto& d : fixture().corpus.dialogues()) out.push_back(&d);
    return out;
}

void BM_SynthCorpus(benchmark::State& st) {
    exp::SynthSpec s;
    s.n_speakers = 100;
    s.n_pairs = 400;
    for (auto _ : st) benchmark::DoNotOptimize(exp::generate_synthetic_corpus(s, exec_of(st)));
}

void BM_BuildExamples(benchmark::State& st) {
    const exp::Featurizer f(embed::EncoderSpec{});
    const model::ModelConfig mc;
    const auto ds = all_dialogues();
    for (auto _ : st) benchmark::DoNotOptimize(exp::build_examples(fixture().corpus, ds, f, mc, std::nullopt, exec_of(st)));
}

void BM_Augment(benchmark::State& st) {
    augment::AugmentOptions o;
    o.count = 2000;
    o.seed = 3;
    const auto ds = all_dialogues();
    for (auto _ : st) benchmark::DoNotOptimize(augment::synthesize(fixture().corpus, ds, o, exec_of(st)));
}

void BM_BatchGradient(benchmark::State& st) {
    const model::ModelConfig mc;
    const exp::Featurizer f(embed::EncoderSpec{});
    auto ds = all_dialogues();
    ds.resize(32);
    const auto examples = exp::build_examples(fixture().corpus, ds, f, mc);
    std::vector<const exp::Example*> batch;
    for (const auto& e : examples) batch.push_back(&e);
    const model::Model m(mc);
    for (auto _ : st) benchmark::DoNotOptimize(exp::batch_gradient(m, batch, exec_of(st)));
}

}  // namespace

BENCHMARK(BM_SynthCorpus)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildExamples)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Augment)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchGradient)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
