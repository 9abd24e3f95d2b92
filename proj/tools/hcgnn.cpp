// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hcgnn/augment/augment.hpp"
#include "hcgnn/corpus/split.hpp"
#include "hcgnn/diffcore/error.hpp"
#include "hcgnn/diffcore/keyvalue.hpp"
#include "hcgnn/experiment/config.hpp"
#include "hcgnn/experiment/data.hpp"
#include "hcgnn/experiment/synth.hpp"
#include "hcgnn/experiment/train.hpp"

namespace fs = std::filesystem;
using namespace hcgnn;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Fault("cannot write " + path.string());
    out << text;
}

std::array<double, 3> parse_ratios(const std::string& s) {
    std::array<double, 3> r{};
    std::size_t start = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto colon = s.find(':', start);
        if ((i < 2) == (colon == std::string::npos)) throw Fault("--ratios expects A:B:C, got '" + s + "'");
        r[i] = kv::parse_real("ratios", s.substr(start, colon == std::string::npos ? std::string::npos : colon - start));
        start = colon + 1;
    }
    return r;
}

void parse_beta(const std::string& s, augment::AugmentOptions& o) {
    if (s == "uniform") {
        o.beta_mode = augment::BetaMode::Uniform01;
    } else if (s.rfind("fixed:", 0) == 0) {
        o.beta_mode = augment::BetaMode::Fixed;
        o.beta0 = kv::parse_real("beta", s.substr(6));
    } else {
        throw Fault("--beta expects uniform or fixed:X, got '" + s + "'");
    }
}

void parse_truncate(const std::string& s, augment::AugmentOptions& o) {
    if (s == "off") {
        o.truncate = false;
    } else if (s.rfind("min:", 0) == 0) {
        o.truncate = true;
        o.t_min = kv::parse_size("truncate", s.substr(4));
    } else {
        throw Fault("--truncate expects off or min:K, got '" + s + "'");
    }
}

void write_reports(const fs::path& json_path, const std::vector<exp::SweepRow>& rows) {
    write_text(json_path, exp::report_json(rows).dump(2) + "\n");
    auto csv = json_path;
    csv.replace_extension(".csv");
    write_text(csv, exp::report_csv(rows));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heterogeneous conversation-graph personality recognition"};
    app.require_subcommand(1);
    bool serial = false;
    app.add_flag("--serial", serial, "Use the single-threaded reference kernels");
    const auto exec = [&] { return serial ? Execution::Serial : Execution::Parallel; };

    // gen-synth
    auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic corpus");
    std::string spec_file, out_dir;
    std::uint64_t seed = 0;
    gen->add_option("--spec", spec_file, "key=value synthetic spec")->required();
    gen->add_option("--out", out_dir, "Output directory")->required();
    gen->add_option("--seed", seed, "Seed (overrides the spec)")->required();

    // split
    auto* split = app.add_subcommand("split", "Speaker-disjoint train/valid/test split");
    std::string corpus_file, ratios = "8:1:1", out_file;
    std::size_t trials = 100;
    split->add_option("--corpus", corpus_file)->required();
    split->add_option("--ratios", ratios, "A:B:C")->capture_default_str();
    split->add_option("--trials", trials)->capture_default_str();
    split->add_option("--seed", seed)->required();
    split->add_option("--out", out_file)->required();

    // augment
    auto* aug = app.add_subcommand("augment", "Interpolation augmentation of the training partition");
    std::string split_file, beta = "uniform", speakers = "cross", truncate = "off", setting_aug = "dialogue";
    std::size_t count = 0, t = 3;
    aug->add_option("--corpus", corpus_file)->required();
    aug->add_option("--split", split_file)->required();
    aug->add_option("--count", count)->required();
    aug->add_option("--beta", beta, "uniform | fixed:X")->capture_default_str();
    aug->add_option("--speakers", speakers, "cross | same")->capture_default_str();
    aug->add_option("--truncate", truncate, "off | min:K")->capture_default_str();
    aug->add_option("--t", t, "Turns per chunk")->capture_default_str();
    aug->add_option("--setting", setting_aug, "dialogue | monologue")->capture_default_str();
    aug->add_option("--seed", seed)->required();
    aug->add_option("--out", out_dir)->required();

    // train
    auto* tr = app.add_subcommand("train", "Train a model");
    std::string variant, setting, config_file, data_dir, ckpt, log_file;
    tr->add_option("--variant", variant, "hcgnn | mlp | gcn | gat | rgcn")->required();
    tr->add_option("--setting", setting, "monologue | dialogue")->required();
    tr->add_option("--config", config_file, "key=value config")->required();
    tr->add_option("--data", data_dir)->required();
    tr->add_option("--out", ckpt)->required();
    tr->add_option("--log", log_file, "Also write the epoch log here");

    // eval
    auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on the test partition");
    std::string report;
    ev->add_option("--ckpt", ckpt)->required();
    ev->add_option("--data", data_dir)->required();
    ev->add_option("--report", report, "JSON report; a CSV is written alongside")->required();

    // context-sweep
    auto* sw = app.add_subcommand("context-sweep", "Evaluate on test dialogues cut to k turns");
    std::string ks = "2,3,4,5,10,full";
    sw->add_option("--ckpt", ckpt)->required();
    sw->add_option("--data", data_dir)->required();
    sw->add_option("--ks", ks)->capture_default_str();
    sw->add_option("--report", report, "JSON report; a CSV is written alongside");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            auto spec = exp::load_synth_spec(spec_file);
            spec.seed = seed;
            const auto r = exp::generate_synthetic_corpus(spec, exec());
            fs::create_directories(out_dir);
            corpus::save_corpus(r.corpus, fs::path(out_dir) / exp::kCorpusFile);
            write_text(fs::path(out_dir) / "synth_notes.json", r.notes.dump(2) + "\n");
            std::cout << "wrote " << r.corpus.speakers().size() << " speakers, " << r.corpus.dialogues().size()
                      << " dialogues to " << out_dir << "\n";
        } else if (*split) {
            const auto c = corpus::load_corpus(corpus_file);
            corpus::SplitOptions opts;
            opts.ratios = parse_ratios(ratios);
            opts.trials = trials;
            opts.seed = seed;
            const auto s = corpus::speaker_split(c, opts);
            if (fs::path(out_file).has_parent_path()) fs::create_directories(fs::path(out_file).parent_path());
            corpus::save_split(s, out_file);
            std::cout << "train " << s.train.size() << ", valid " << s.valid.size() << ", test " << s.test.size()
                      << " speakers; deviation " << s.deviation << "\n";
        } else if (*aug) {
            const auto c = corpus::load_corpus(corpus_file);
            const auto s = corpus::load_split(split_file);
            augment::AugmentOptions opts;
            parse_beta(beta, opts);
            if (speakers == "cross") opts.speaker_mode = augment::SpeakerMode::CrossSpeaker;
            else if (speakers == "same") opts.speaker_mode = augment::SpeakerMode::SameSpeaker;
            else throw Fault("--speakers expects cross or same, got '" + speakers + "'");
            parse_truncate(truncate, opts);
            opts.t = t;
            opts.count = count;
            opts.seed = seed;
            opts.setting = setting_aug == "monologue" ? augment::Setting::Monologue : augment::Setting::Dialogue;
            if (setting_aug != "monologue" && setting_aug != "dialogue")
                throw Fault("--setting expects dialogue or monologue");
            const auto train_d = corpus::dialogues_in(c, s, corpus::Partition::Train);
            const auto samples = augment::synthesize(c, train_d, opts, exec());
            const fs::path out(out_dir);
            fs::create_directories(out);
            corpus::save_corpus(c, out / exp::kCorpusFile);
            corpus::save_split(s, out / exp::kSplitFile);
            corpus::save_corpus(augment::to_corpus(samples), out / exp::kAugmentedFile);
            std::ofstream prov(out / exp::kProvenanceFile);
            augment::write_provenance(samples, prov);
            std::cout << "wrote " << samples.size() << " synthetic dialogues to " << out_dir << "\n";
        } else if (*tr) {
            exp::RunConfig base;
            base.model.variant = model::parse_variant(variant);
            auto cfg = exp::load_run_config(config_file, base);
            cfg.model.variant = model::parse_variant(variant);
            cfg.model.setting = model::parse_setting(setting);
            cfg.model.relations = model::ModelConfig::default_relations(cfg.model.setting);
            const auto data = exp::load_data_dir(data_dir);
            const auto r = exp::train_on_data(data, cfg, exec(), [](const exp::EpochLog& e) {
                std::cerr << "epoch " << e.epoch << " train " << e.train_loss << " valid " << e.valid_loss
                          << " lr " << e.lr << (e.improved ? " *" : "") << "\n";
            });
            auto ck = r.checkpoint;
            ck.meta["log"] = r.log.to_json();
            if (fs::path(ckpt).has_parent_path()) fs::create_directories(fs::path(ckpt).parent_path());
            model::save_checkpoint(ck, ckpt);
            if (!log_file.empty()) write_text(log_file, r.log.to_text());
            std::cout << "best epoch " << r.log.best_epoch << " of " << r.log.epochs.size() << "; saved " << ckpt
                      << "\n";
        } else if (*ev) {
            const auto ck = model::load_checkpoint(ckpt);
            const auto data = exp::load_data_dir(data_dir);
            const std::vector<exp::SweepRow> rows{{"test", exp::evaluate_on_data(ck, data, std::nullopt, exec())}};
            write_reports(report, rows);
            std::cout << exp::report_csv(rows);
        } else if (*sw) {
            const auto ck = model::load_checkpoint(ckpt);
            const auto data = exp::load_data_dir(data_dir);
            const auto rows = exp::context_sweep(ck, data, exp::parse_context_ks(ks), exec());
            if (!report.empty()) write_reports(report, rows);
            std::cout << exp::report_csv(rows);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
