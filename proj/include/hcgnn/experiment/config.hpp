// Copyright (c) 2026, The hcgnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "hcgnn/model/model.hpp"

namespace hcgnn::exp {

struct TrainConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t warmup_steps = 150;
    std::size_t max_epochs = 100;
    std::size_t patience = 3;
    std::size_t batch_size = 16;
    std::uint64_t seed = 0;

    /// Small-embedding profile used for synthetic runs.
    static TrainConfig desk();
    /// Hyperparameters for 768-dim encoder features; linear
    /// models take batches of 128, graph models 32.
    static TrainConfig large(model::Variant v);

    void validate() const;
    bool set(const std::string& key, const std::string& value);
    nlohmann::json to_json() const;
    static TrainConfig from_json(const nlohmann::json& j);

    bool operator==(const TrainConfig&) const = default;
};

struct RunConfig {
    model::ModelConfig model;
    TrainConfig train;
};

/// Flat key=value config. Keys name ModelConfig or TrainConfig fields; the
/// optional key `profile` (desk|large) selects the TrainConfig baseline
/// before the other keys apply, wherever it appears.
RunConfig read_run_config(std::istream& in, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});
void write_run_config(const RunConfig& cfg, std::ostream& out);

}  // namespace hcgnn::exp
