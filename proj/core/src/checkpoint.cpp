#include "cdec/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include "cdec/container.hpp"
#include "cdec/errors.hpp"

namespace cdec {

namespace {

using nlohmann::json;

json decoder_config_to_json(const DecoderConfig& cfg) {
    return json{{"d_model", cfg.d_model},       {"n_heads", cfg.n_heads},
                {"ffn_mult", cfg.ffn_mult},     {"group_factor", cfg.group_factor},
                {"n_layers", cfg.n_layers},     {"ln_eps", cfg.ln_eps}};
}

DecoderConfig decoder_config_from_json(const json& j) {
    DecoderConfig cfg;
    cfg.d_model = j.at("d_model").get<std::size_t>();
    cfg.n_heads = j.at("n_heads").get<std::size_t>();
    cfg.ffn_mult = j.at("ffn_mult").get<std::size_t>();
    cfg.group_factor = j.at("group_factor").get<std::size_t>();
    cfg.n_layers = j.at("n_layers").get<std::size_t>();
    cfg.ln_eps = j.at("ln_eps").get<double>();
    cfg.validate();
    return cfg;
}

}  // namespace

void write_checkpoint_file(const std::string& path, const Checkpoint& ckpt) {
    ckpt.decoder.validate();
    ckpt.train.validate();
    ckpt.vocab.validate();

    RawContainer raw;
    raw.tag = SectionTag::kCheckpoint;

    json names = json::array();
    json seen = json::array();
    for (const auto& e : ckpt.vocab.classes) {
        names.push_back(e.name);
        seen.push_back(e.seen);
    }
    json manifest = json::array();
    for (const auto& e : ckpt.params) {
        manifest.push_back(
            {{"name", e.name}, {"rows", e.value.rows()}, {"cols", e.value.cols()}});
        wire::put_matrix_f32(raw.payload, e.value);
    }
    json header{{"decoder_config", decoder_config_to_json(ckpt.decoder)},
                {"train_config", train_config_to_text(ckpt.train)},
                {"vocabulary", {{"names", names}, {"seen", seen}}},
                {"final_loss",
                 {{"total", ckpt.final_loss.total},
                  {"clip", ckpt.final_loss.clip},
                  {"classification", ckpt.final_loss.classification}}},
                {"tensors", manifest}};
    raw.header_json = header.dump();
    write_container(path, raw);
}

Checkpoint read_checkpoint_file(const std::string& path) {
    RawContainer raw = read_container(path);
    if (raw.tag != SectionTag::kCheckpoint) {
        throw ConsistencyError("'" + path + "' is not a checkpoint file");
    }
    json header = json::parse(raw.header_json, nullptr, /*allow_exceptions=*/false);
    if (header.is_discarded()) {
        throw ConsistencyError("checkpoint: header is not valid JSON");
    }

    Checkpoint ckpt;
    ckpt.decoder = decoder_config_from_json(header.at("decoder_config"));
    ckpt.train =
        parse_train_config_text(header.at("train_config").get<std::string>());

    const auto& vocab_json = header.at("vocabulary");
    const auto& names = vocab_json.at("names");
    const auto& seen = vocab_json.at("seen");
    if (names.size() != seen.size()) {
        throw ConsistencyError("checkpoint: vocabulary names/seen length mismatch");
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        ckpt.vocab.classes.push_back(
            {names[i].get<std::string>(), seen[i].get<bool>()});
    }
    ckpt.vocab.validate();

    const auto& loss = header.at("final_loss");
    ckpt.final_loss.total = loss.at("total").get<double>();
    ckpt.final_loss.clip = loss.at("clip").get<double>();
    ckpt.final_loss.classification = loss.at("classification").get<double>();

    wire::Cursor cur(raw.payload);
    for (const auto& entry : header.at("tensors")) {
        const auto name = entry.at("name").get<std::string>();
        const auto rows = entry.at("rows").get<std::size_t>();
        const auto cols = entry.at("cols").get<std::size_t>();
        ckpt.params.add(name, cur.read_matrix_f32(rows, cols));
    }
    cur.require_done();
    return ckpt;
}

}  // namespace cdec
