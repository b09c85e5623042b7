#pragma once

#include <filesystem>

#include "canopy/train/sgd.hpp"

namespace canopy::train {

// Training hyperparameter schema. The allowed value sets are the published
// configuration grid; validate(allow_custom=true) relaxes the set membership
// checks but keeps positivity/finiteness. mask_ratio and anchors_per_image
// are carried for schema fidelity; no kernel here consumes them.
struct TrainConfig {
    double learning_rate = 0.01; // {0.01, 0.03}
    int epochs = 500;            // 500
    int batch_size = 16;         // {16, 32}
    double momentum = 0.938;     // 0.938
    double weight_decay = 0.0005; // {0.0005, 0.001}
    double mask_ratio = 0.4;     // 0.4
    int anchors_per_image = 4;   // {4, 8}

    void validate(bool allow_custom = false) const;
    SgdParams sgd() const { return {learning_rate, momentum, weight_decay}; }
};

// "key = value" lines, one per field, # comments allowed.
TrainConfig load_train_config(const std::filesystem::path& path);
void save_train_config(const TrainConfig& cfg, const std::filesystem::path& path);

} // namespace canopy::train
