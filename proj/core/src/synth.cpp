#include "cdec/synth.hpp"

#include <cmath>
#include <string>

#include "cdec/errors.hpp"
#include "cdec/rng.hpp"

namespace cdec {

namespace {

constexpr double kNormEps = 1e-12;

Matrix random_unit_rows(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    return l2_normalize_rows(m, kNormEps);
}

// k distinct indices from pool, order by draw; partial Fisher-Yates.
std::vector<std::uint32_t> sample_labels(const std::vector<std::uint32_t>& pool,
                                         std::size_t k, Rng& rng) {
    std::vector<std::uint32_t> work = pool;
    std::vector<std::uint32_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(work.size() - i));
        std::swap(work[i], work[j]);
        out.push_back(work[i]);
    }
    return out;
}

Matrix mean_prototype(const Matrix& prototypes,
                      const std::vector<std::uint32_t>& labels) {
    Matrix m(1, prototypes.cols());
    for (std::uint32_t c : labels) {
        for (std::size_t j = 0; j < prototypes.cols(); ++j) {
            m.at(0, j) += prototypes.at(c, j);
        }
    }
    return scale(m, 1.0 / static_cast<double>(labels.size()));
}

std::vector<SampleRecord> make_records(const SynthConfig& cfg,
                                       const Matrix& prototypes,
                                       const Matrix& mixer,
                                       const std::vector<std::uint32_t>& pool,
                                       std::size_t count, Rng& rng) {
    std::vector<SampleRecord> out;
    out.reserve(count);
    const std::uint32_t max_k =
        std::min<std::uint32_t>(cfg.labels_max, static_cast<std::uint32_t>(pool.size()));
    const std::uint32_t min_k = std::min<std::uint32_t>(cfg.labels_min, max_k);
    for (std::size_t r = 0; r < count; ++r) {
        std::uint32_t k =
            min_k + static_cast<std::uint32_t>(rng.below(max_k - min_k + 1));
        SampleRecord rec;
        rec.labels = sample_labels(pool, k, rng);
        Matrix proto_mean = mean_prototype(prototypes, rec.labels);
        Matrix base = matmul(proto_mean, mixer);  // 1 x d_in
        rec.tokens = Matrix(cfg.tokens_per_image, cfg.d_in);
        for (std::size_t t = 0; t < cfg.tokens_per_image; ++t) {
            for (std::size_t j = 0; j < cfg.d_in; ++j) {
                rec.tokens.at(t, j) = base.at(0, j) + cfg.sigma_img * rng.normal();
            }
        }
        // noise-free stand-in for the text encoder on this record's prompt
        rec.text_embedding = l2_normalize_rows(proto_mean, kNormEps);
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace

void SynthConfig::validate() const {
    if (class_count < 1 || train_count < 1 || test_count < 1 ||
        tokens_per_image < 1 || d_in < 1 || d_text < 1 || labels_min < 1) {
        throw ConfigError("synth config: all counts must be >= 1");
    }
    if (!(seen_fraction > 0.0 && seen_fraction < 1.0)) {
        throw ConfigError("synth config: seen fraction must be in (0, 1)");
    }
    if (sigma_img < 0.0 || sigma_text < 0.0) {
        throw ConfigError("synth config: noise sigma must be >= 0");
    }
    if (labels_max < labels_min) {
        throw ConfigError("synth config: labels_max < labels_min");
    }
    if (labels_max > class_count) {
        throw ConfigError("synth config: labels_max " + std::to_string(labels_max) +
                          " exceeds class count " + std::to_string(class_count));
    }
    const auto n_seen =
        static_cast<std::uint32_t>(std::lround(seen_fraction * class_count));
    if (n_seen < 1 || n_seen >= class_count) {
        throw ConfigError("synth config: split leaves no seen or no unseen classes");
    }
}

SynthDataset generate_synthetic_dataset(const SynthConfig& cfg) {
    cfg.validate();

    SynthDataset out;
    const auto n_seen =
        static_cast<std::uint32_t>(std::lround(cfg.seen_fraction * cfg.class_count));
    for (std::uint32_t c = 0; c < cfg.class_count; ++c) {
        out.vocab.classes.push_back({"class" + std::to_string(c), c < n_seen});
    }
    out.vocab.validate();

    Rng proto_rng(derive_seed(cfg.seed, "prototypes"));
    out.prototypes = random_unit_rows(cfg.class_count, cfg.d_text, proto_rng);

    Rng text_rng(derive_seed(cfg.seed, "text"));
    Matrix text(cfg.class_count, cfg.d_text);
    for (std::size_t i = 0; i < text.size(); ++i) {
        text.data()[i] = out.prototypes.data()[i] + cfg.sigma_text * text_rng.normal();
    }
    out.query_bank.embeddings = l2_normalize_rows(text, kNormEps);
    out.query_bank.provenance = QueryBankSource::Provenance::kSynthetic;

    Rng mixer_rng(derive_seed(cfg.seed, "mixer"));
    Matrix mixer(cfg.d_text, cfg.d_in);
    const double mixer_scale = 1.0 / std::sqrt(static_cast<double>(cfg.d_text));
    for (std::size_t i = 0; i < mixer.size(); ++i) {
        mixer.data()[i] = mixer_rng.normal() * mixer_scale;
    }

    auto [seen, unseen] = split_seen_unseen(out.vocab);
    std::vector<std::uint32_t> all(cfg.class_count);
    for (std::uint32_t c = 0; c < cfg.class_count; ++c) all[c] = c;

    Rng train_rng(derive_seed(cfg.seed, "train"));
    out.train = make_records(cfg, out.prototypes, mixer, seen, cfg.train_count,
                             train_rng);
    Rng zsl_rng(derive_seed(cfg.seed, "test-zsl"));
    out.test_zsl = make_records(cfg, out.prototypes, mixer, unseen, cfg.test_count,
                                zsl_rng);
    Rng gzsl_rng(derive_seed(cfg.seed, "test-gzsl"));
    out.test_gzsl = make_records(cfg, out.prototypes, mixer, all, cfg.test_count,
                                 gzsl_rng);
    return out;
}

}  // namespace cdec
