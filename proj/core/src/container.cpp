#include "cdec/container.hpp"

#include <zlib.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "cdec/errors.hpp"

namespace cdec {

namespace wire {

void put_u32(std::vector<std::uint8_t>& buf, std::uint32_t v) {
    buf.push_back(static_cast<std::uint8_t>(v & 0xff));
    buf.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    buf.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    buf.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

void put_f32(std::vector<std::uint8_t>& buf, float v) {
    put_u32(buf, std::bit_cast<std::uint32_t>(v));
}

void put_matrix_f32(std::vector<std::uint8_t>& buf, const Matrix& m) {
    for (double v : m.values()) put_f32(buf, static_cast<float>(v));
}

void Cursor::need(std::size_t n) const {
    if (pos_ + n > buf_.size()) {
        throw TruncatedError("container: payload ends early (need " +
                             std::to_string(n) + " bytes at offset " +
                             std::to_string(pos_) + ")");
    }
}

std::uint32_t Cursor::read_u32() {
    need(4);
    std::uint32_t v = static_cast<std::uint32_t>(buf_[pos_]) |
                      static_cast<std::uint32_t>(buf_[pos_ + 1]) << 8 |
                      static_cast<std::uint32_t>(buf_[pos_ + 2]) << 16 |
                      static_cast<std::uint32_t>(buf_[pos_ + 3]) << 24;
    pos_ += 4;
    return v;
}

float Cursor::read_f32() { return std::bit_cast<float>(read_u32()); }

Matrix Cursor::read_matrix_f32(std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) {
        m.data()[i] = static_cast<double>(read_f32());
    }
    return m;
}

void Cursor::require_done() const {
    if (pos_ != buf_.size()) {
        throw ConsistencyError("container: " + std::to_string(buf_.size() - pos_) +
                               " unexpected trailing payload bytes");
    }
}

}  // namespace wire

namespace {

using nlohmann::json;

std::uint32_t crc_of(const std::vector<std::uint8_t>& bytes, std::size_t from,
                     std::size_t count) {
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, bytes.data() + from, static_cast<uInt>(count));
    return static_cast<std::uint32_t>(crc);
}

json vocab_to_json(const ClassVocabulary& vocab) {
    json names = json::array();
    json seen = json::array();
    for (const auto& e : vocab.classes) {
        names.push_back(e.name);
        seen.push_back(e.seen);
    }
    return json{{"names", names}, {"seen", seen}};
}

ClassVocabulary vocab_from_json(const json& j) {
    ClassVocabulary vocab;
    const auto& names = j.at("names");
    const auto& seen = j.at("seen");
    if (names.size() != seen.size()) {
        throw ConsistencyError("container: vocabulary names/seen length mismatch");
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        vocab.classes.push_back({names[i].get<std::string>(), seen[i].get<bool>()});
    }
    vocab.validate();
    return vocab;
}

json synth_to_json(const SynthConfig& cfg) {
    return json{{"class_count", cfg.class_count},
                {"seen_fraction", cfg.seen_fraction},
                {"train_count", cfg.train_count},
                {"test_count", cfg.test_count},
                {"tokens_per_image", cfg.tokens_per_image},
                {"d_in", cfg.d_in},
                {"d_text", cfg.d_text},
                {"labels_min", cfg.labels_min},
                {"labels_max", cfg.labels_max},
                {"sigma_img", cfg.sigma_img},
                {"sigma_text", cfg.sigma_text},
                {"seed", cfg.seed}};
}

SynthConfig synth_from_json(const json& j) {
    SynthConfig cfg;
    cfg.class_count = j.at("class_count").get<std::uint32_t>();
    cfg.seen_fraction = j.at("seen_fraction").get<double>();
    cfg.train_count = j.at("train_count").get<std::uint32_t>();
    cfg.test_count = j.at("test_count").get<std::uint32_t>();
    cfg.tokens_per_image = j.at("tokens_per_image").get<std::uint32_t>();
    cfg.d_in = j.at("d_in").get<std::uint32_t>();
    cfg.d_text = j.at("d_text").get<std::uint32_t>();
    cfg.labels_min = j.at("labels_min").get<std::uint32_t>();
    cfg.labels_max = j.at("labels_max").get<std::uint32_t>();
    cfg.sigma_img = j.at("sigma_img").get<double>();
    cfg.sigma_text = j.at("sigma_text").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

json parse_header(const RawContainer& raw) {
    json j = json::parse(raw.header_json, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
        throw ConsistencyError("container: header is not valid JSON");
    }
    return j;
}

}  // namespace

void write_container(const std::string& path, const RawContainer& raw) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(6 + 2 + 1 + 4 + raw.header_json.size() + raw.payload.size() + 4);
    bytes.insert(bytes.end(), kContainerMagic, kContainerMagic + 6);
    bytes.push_back(static_cast<std::uint8_t>(kContainerVersion & 0xff));
    bytes.push_back(static_cast<std::uint8_t>(kContainerVersion >> 8));
    bytes.push_back(static_cast<std::uint8_t>(raw.tag));
    wire::put_u32(bytes, static_cast<std::uint32_t>(raw.header_json.size()));
    bytes.insert(bytes.end(), raw.header_json.begin(), raw.header_json.end());
    bytes.insert(bytes.end(), raw.payload.begin(), raw.payload.end());
    wire::put_u32(bytes, crc_of(bytes, 6, bytes.size() - 6));

    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("container: cannot open '" + tmp.string() + "'");
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("container: short write to '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

RawContainer read_container(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("container: cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());

    if (bytes.size() < 6 || std::memcmp(bytes.data(), kContainerMagic, 6) != 0) {
        throw MagicError("container: bad magic in '" + path + "'");
    }
    // magic + version + tag + header length + trailing crc
    if (bytes.size() < 6 + 2 + 1 + 4 + 4) {
        throw TruncatedError("container: file too short: '" + path + "'");
    }
    std::uint32_t stored_crc = static_cast<std::uint32_t>(bytes[bytes.size() - 4]) |
                               static_cast<std::uint32_t>(bytes[bytes.size() - 3]) << 8 |
                               static_cast<std::uint32_t>(bytes[bytes.size() - 2]) << 16 |
                               static_cast<std::uint32_t>(bytes[bytes.size() - 1]) << 24;
    if (crc_of(bytes, 6, bytes.size() - 10) != stored_crc) {
        throw ChecksumError("container: CRC32 mismatch in '" + path + "'");
    }

    std::uint16_t version = static_cast<std::uint16_t>(bytes[6]) |
                            static_cast<std::uint16_t>(bytes[7]) << 8;
    if (version != kContainerVersion) {
        throw ConsistencyError("container: unsupported version " +
                               std::to_string(version));
    }
    std::uint8_t tag = bytes[8];
    if (tag < 1 || tag > 3) {
        throw ConsistencyError("container: unknown section tag " + std::to_string(tag));
    }
    std::uint32_t header_len = static_cast<std::uint32_t>(bytes[9]) |
                               static_cast<std::uint32_t>(bytes[10]) << 8 |
                               static_cast<std::uint32_t>(bytes[11]) << 16 |
                               static_cast<std::uint32_t>(bytes[12]) << 24;
    std::size_t header_start = 13;
    if (header_start + header_len + 4 > bytes.size()) {
        throw TruncatedError("container: header length exceeds file size");
    }

    RawContainer raw;
    raw.tag = static_cast<SectionTag>(tag);
    raw.header_json.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header_start),
                           bytes.begin() +
                               static_cast<std::ptrdiff_t>(header_start + header_len));
    raw.payload.assign(
        bytes.begin() + static_cast<std::ptrdiff_t>(header_start + header_len),
        bytes.end() - 4);
    return raw;
}

void write_samples_file(const std::string& path, const Dataset& data,
                        const std::optional<SynthConfig>& synth) {
    data.validate();
    if (data.records.empty()) {
        throw ArgumentError("samples file: no records");
    }

    RawContainer raw;
    raw.tag = SectionTag::kSamples;
    const bool has_text = data.has_text_embeddings();
    json header{{"vocabulary", vocab_to_json(data.vocab)},
                {"samples",
                 {{"record_count", data.records.size()},
                  {"tokens_per_image", data.tokens_per_image()},
                  {"d_in", data.d_in()},
                  {"d_text", has_text ? data.records.front().text_embedding.cols() : 0},
                  {"has_text_embeddings", has_text}}}};
    if (synth) header["synth_config"] = synth_to_json(*synth);
    raw.header_json = header.dump();

    for (const SampleRecord& rec : data.records) {
        wire::put_u32(raw.payload, static_cast<std::uint32_t>(rec.labels.size()));
        for (std::uint32_t c : rec.labels) wire::put_u32(raw.payload, c);
        wire::put_matrix_f32(raw.payload, rec.tokens);
        if (has_text) wire::put_matrix_f32(raw.payload, rec.text_embedding);
    }
    write_container(path, raw);
}

SamplesFile read_samples_file(const std::string& path) {
    RawContainer raw = read_container(path);
    if (raw.tag != SectionTag::kSamples) {
        throw ConsistencyError("'" + path + "' is not a samples file");
    }
    json header = parse_header(raw);

    SamplesFile out;
    out.data.vocab = vocab_from_json(header.at("vocabulary"));
    if (header.contains("synth_config")) {
        out.synth = synth_from_json(header.at("synth_config"));
    }

    const auto& s = header.at("samples");
    const auto record_count = s.at("record_count").get<std::size_t>();
    const auto n = s.at("tokens_per_image").get<std::size_t>();
    const auto d_in = s.at("d_in").get<std::size_t>();
    const auto d_text = s.at("d_text").get<std::size_t>();
    const bool has_text = s.at("has_text_embeddings").get<bool>();
    if (n < 1 || d_in < 1 || record_count < 1) {
        throw ConsistencyError("samples file: degenerate shapes in header");
    }

    wire::Cursor cur(raw.payload);
    out.data.records.reserve(record_count);
    for (std::size_t r = 0; r < record_count; ++r) {
        SampleRecord rec;
        std::uint32_t label_count = cur.read_u32();
        rec.labels.reserve(label_count);
        for (std::uint32_t i = 0; i < label_count; ++i) {
            std::uint32_t c = cur.read_u32();
            if (c >= out.data.vocab.size()) {
                throw ConsistencyError("samples file: label index " +
                                       std::to_string(c) + " out of range");
            }
            rec.labels.push_back(c);
        }
        rec.tokens = cur.read_matrix_f32(n, d_in);
        if (has_text) rec.text_embedding = cur.read_matrix_f32(1, d_text);
        out.data.records.push_back(std::move(rec));
    }
    cur.require_done();
    out.data.validate();
    return out;
}

void write_query_bank_file(const std::string& path, const ClassVocabulary& vocab,
                           const QueryBankSource& bank) {
    vocab.validate();
    if (bank.embeddings.rows() != vocab.size()) {
        throw ConsistencyError("query bank: " + std::to_string(bank.embeddings.rows()) +
                               " rows for " + std::to_string(vocab.size()) + " classes");
    }
    RawContainer raw;
    raw.tag = SectionTag::kQueryBank;
    json header{{"vocabulary", vocab_to_json(vocab)},
                {"query_bank",
                 {{"d_text", bank.embeddings.cols()},
                  {"provenance",
                   bank.provenance == QueryBankSource::Provenance::kSynthetic
                       ? "synthetic"
                       : "file"}}}};
    raw.header_json = header.dump();
    wire::put_matrix_f32(raw.payload, bank.embeddings);
    write_container(path, raw);
}

QueryBankFile read_query_bank_file(const std::string& path) {
    RawContainer raw = read_container(path);
    if (raw.tag != SectionTag::kQueryBank) {
        throw ConsistencyError("'" + path + "' is not a query bank file");
    }
    json header = parse_header(raw);

    QueryBankFile out;
    out.vocab = vocab_from_json(header.at("vocabulary"));
    const auto& qb = header.at("query_bank");
    const auto d_text = qb.at("d_text").get<std::size_t>();
    if (d_text < 1) {
        throw ConsistencyError("query bank: d_text must be >= 1");
    }
    const std::size_t expected = out.vocab.size() * d_text * 4;
    if (raw.payload.size() != expected) {
        throw ConsistencyError("query bank: payload holds " +
                               std::to_string(raw.payload.size() / (4 * d_text)) +
                               " rows for " + std::to_string(out.vocab.size()) +
                               "-class vocabulary");
    }
    wire::Cursor cur(raw.payload);
    out.bank.embeddings = cur.read_matrix_f32(out.vocab.size(), d_text);
    cur.require_done();
    out.bank.provenance = qb.at("provenance").get<std::string>() == "synthetic"
                              ? QueryBankSource::Provenance::kSynthetic
                              : QueryBankSource::Provenance::kFile;
    return out;
}

}  // namespace cdec
