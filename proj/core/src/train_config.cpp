#include "cdec/train_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cdec/errors.hpp"

namespace cdec {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number '" + value + "' for " + key);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("config: bad integer '" + value + "' for " + key);
    }
    return v;
}

std::vector<std::size_t> parse_ks(const std::string& value) {
    std::vector<std::size_t> ks;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        ks.push_back(static_cast<std::size_t>(parse_u64("eval_ks", item)));
    }
    if (ks.empty()) throw ConfigError("config: eval_ks is empty");
    return ks;
}

void apply(TrainConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "epochs") {
        cfg.epochs = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "batch_size") {
        cfg.batch_size = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "learning_rate") {
        cfg.learning_rate = parse_double(key, value);
    } else if (key == "alpha") {
        cfg.weights.alpha = parse_double(key, value);
    } else if (key == "beta") {
        cfg.weights.beta = parse_double(key, value);
    } else if (key == "tau") {
        cfg.weights.tau = parse_double(key, value);
    } else if (key == "clip_variant") {
        if (value == "infonce") {
            cfg.clip_variant = ClipVariant::kInfoNce;
        } else if (value == "cosine") {
            cfg.clip_variant = ClipVariant::kCosine;
        } else {
            throw ConfigError("config: clip_variant must be infonce or cosine");
        }
    } else if (key == "adam_beta1") {
        cfg.adam_beta1 = parse_double(key, value);
    } else if (key == "adam_beta2") {
        cfg.adam_beta2 = parse_double(key, value);
    } else if (key == "adam_epsilon") {
        cfg.adam_epsilon = parse_double(key, value);
    } else if (key == "seed") {
        cfg.seed = parse_u64(key, value);
    } else if (key == "eval_ks") {
        cfg.eval_ks = parse_ks(value);
    } else if (key == "gamma") {
        cfg.gamma = parse_double(key, value);
    } else if (key == "align_dim") {
        cfg.align_dim = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "template") {
        cfg.template_id = value;
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

}  // namespace

void TrainConfig::validate() const {
    if (batch_size < 1) throw ConfigError("config: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("config: learning_rate must be > 0");
    weights.validate();
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw ConfigError("config: gamma must be in (0, 1]");
    }
    if (align_dim < 1) throw ConfigError("config: align_dim must be >= 1");
    if (eval_ks.empty()) throw ConfigError("config: eval_ks is empty");
    for (std::size_t k : eval_ks) {
        if (k < 1) throw ConfigError("config: eval_ks entries must be >= 1");
    }
}

TrainConfig parse_train_config_text(const std::string& text, TrainConfig base) {
    std::stringstream ss(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not key=value: '" + stripped + "'");
        }
        apply(base, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    base.validate();
    return base;
}

TrainConfig parse_train_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_train_config_text(buf.str());
}

std::string train_config_to_text(const TrainConfig& cfg) {
    char buf[64];
    std::string out;
    auto put = [&out](const std::string& key, const std::string& value) {
        out += key + "=" + value + "\n";
    };
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    put("epochs", std::to_string(cfg.epochs));
    put("batch_size", std::to_string(cfg.batch_size));
    put("learning_rate", fmt(cfg.learning_rate));
    put("alpha", fmt(cfg.weights.alpha));
    put("beta", fmt(cfg.weights.beta));
    put("tau", fmt(cfg.weights.tau));
    put("clip_variant",
        cfg.clip_variant == ClipVariant::kInfoNce ? "infonce" : "cosine");
    put("adam_beta1", fmt(cfg.adam_beta1));
    put("adam_beta2", fmt(cfg.adam_beta2));
    put("adam_epsilon", fmt(cfg.adam_epsilon));
    put("seed", std::to_string(cfg.seed));
    std::string ks;
    for (std::size_t k : cfg.eval_ks) {
        if (!ks.empty()) ks += ",";
        ks += std::to_string(k);
    }
    put("eval_ks", ks);
    put("gamma", fmt(cfg.gamma));
    put("align_dim", std::to_string(cfg.align_dim));
    put("template", cfg.template_id);
    return out;
}

}  // namespace cdec
