#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cdec/dataset.hpp"
#include "cdec/synth.hpp"

namespace cdec {

// Binary container framing shared by dataset, query-bank and checkpoint
// files:
//
//   magic "CDEC1\0" | u16 version=1 | u8 section tag | u32 header length |
//   UTF-8 JSON header | payload | u32 CRC32 of everything after the magic
//
// All integers and floats little-endian; tensor payloads are 32-bit floats
// in row-major order. Files are written atomically (temp + rename).

inline constexpr char kContainerMagic[6] = {'C', 'D', 'E', 'C', '1', '\0'};
inline constexpr std::uint16_t kContainerVersion = 1;

enum class SectionTag : std::uint8_t {
    kSamples = 1,
    kQueryBank = 2,
    kCheckpoint = 3,
};

struct RawContainer {
    SectionTag tag = SectionTag::kSamples;
    std::string header_json;
    std::vector<std::uint8_t> payload;
};

void write_container(const std::string& path, const RawContainer& raw);

// Throws MagicError / TruncatedError / ChecksumError / ConsistencyError.
RawContainer read_container(const std::string& path);

// --- typed sections -------------------------------------------------------

void write_samples_file(const std::string& path, const Dataset& data,
                        const std::optional<SynthConfig>& synth = std::nullopt);

struct SamplesFile {
    Dataset data;
    std::optional<SynthConfig> synth;
};
SamplesFile read_samples_file(const std::string& path);

void write_query_bank_file(const std::string& path, const ClassVocabulary& vocab,
                           const QueryBankSource& bank);

struct QueryBankFile {
    ClassVocabulary vocab;
    QueryBankSource bank;
};
QueryBankFile read_query_bank_file(const std::string& path);

// --- payload encoding helpers (shared with checkpoint io) ------------------

namespace wire {

void put_u32(std::vector<std::uint8_t>& buf, std::uint32_t v);
void put_f32(std::vector<std::uint8_t>& buf, float v);
void put_matrix_f32(std::vector<std::uint8_t>& buf, const Matrix& m);

class Cursor {
public:
    explicit Cursor(const std::vector<std::uint8_t>& buf) : buf_(buf) {}

    std::uint32_t read_u32();
    float read_f32();
    Matrix read_matrix_f32(std::size_t rows, std::size_t cols);
    std::size_t remaining() const { return buf_.size() - pos_; }

    // Throws ConsistencyError when payload bytes are left over.
    void require_done() const;

private:
    void need(std::size_t n) const;
    const std::vector<std::uint8_t>& buf_;
    std::size_t pos_ = 0;
};

}  // namespace wire

}  // namespace cdec
