#include "canopy/train/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "canopy/util/error.hpp"

namespace canopy::train {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

bool one_of(double v, std::initializer_list<double> allowed) {
    for (double a : allowed)
        if (v == a) return true;
    return false;
}

bool one_of(int v, std::initializer_list<int> allowed) {
    for (int a : allowed)
        if (v == a) return true;
    return false;
}

} // namespace

void TrainConfig::validate(bool allow_custom) const {
    require(std::isfinite(learning_rate) && learning_rate > 0.0,
            "learning_rate must be positive");
    require(epochs > 0, "epochs must be positive");
    require(batch_size > 0, "batch_size must be positive");
    require(std::isfinite(momentum) && momentum >= 0.0 && momentum < 1.0,
            "momentum must be in [0, 1)");
    require(std::isfinite(weight_decay) && weight_decay >= 0.0,
            "weight_decay must be non-negative");
    require(std::isfinite(mask_ratio) && mask_ratio > 0.0,
            "mask_ratio must be positive");
    require(anchors_per_image > 0, "anchors_per_image must be positive");
    if (allow_custom) return;

    require(one_of(learning_rate, {0.01, 0.03}),
            "learning_rate must be 0.01 or 0.03 (or pass allow_custom)");
    require(epochs == 500, "epochs must be 500 (or pass allow_custom)");
    require(one_of(batch_size, {16, 32}),
            "batch_size must be 16 or 32 (or pass allow_custom)");
    require(momentum == 0.938, "momentum must be 0.938 (or pass allow_custom)");
    require(one_of(weight_decay, {0.0005, 0.001}),
            "weight_decay must be 0.0005 or 0.001 (or pass allow_custom)");
    require(mask_ratio == 0.4, "mask_ratio must be 0.4 (or pass allow_custom)");
    require(one_of(anchors_per_image, {4, 8}),
            "anchors_per_image must be 4 or 8 (or pass allow_custom)");
}

TrainConfig load_train_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open training config: " + path.string());

    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected \"key = value\"");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": empty key or value");
        if (kv.count(key))
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": duplicate key \"" + key + "\"");
        kv[key] = value;
    }

    TrainConfig cfg;
    auto take_double = [&](const char* key, double& out) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        try {
            std::size_t used = 0;
            out = std::stod(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError(path.string() + ": bad number for \"" + std::string(key) +
                             "\": " + it->second);
        }
        kv.erase(it);
    };
    auto take_int = [&](const char* key, int& out) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        try {
            std::size_t used = 0;
            out = std::stoi(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError(path.string() + ": bad integer for \"" + std::string(key) +
                             "\": " + it->second);
        }
        kv.erase(it);
    };

    take_double("learning_rate", cfg.learning_rate);
    take_int("epochs", cfg.epochs);
    take_int("batch_size", cfg.batch_size);
    take_double("momentum", cfg.momentum);
    take_double("weight_decay", cfg.weight_decay);
    take_double("mask_ratio", cfg.mask_ratio);
    take_int("anchors_per_image", cfg.anchors_per_image);

    if (!kv.empty())
        throw ConfigError(path.string() + ": unknown key \"" + kv.begin()->first + "\"");
    return cfg;
}

void save_train_config(const TrainConfig& cfg, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write training config: " + path.string());
    std::ostringstream body;
    body.precision(17);
    body << "learning_rate = " << cfg.learning_rate << "\n"
         << "epochs = " << cfg.epochs << "\n"
         << "batch_size = " << cfg.batch_size << "\n"
         << "momentum = " << cfg.momentum << "\n"
         << "weight_decay = " << cfg.weight_decay << "\n"
         << "mask_ratio = " << cfg.mask_ratio << "\n"
         << "anchors_per_image = " << cfg.anchors_per_image << "\n";
    out << body.str();
}

} // namespace canopy::train
