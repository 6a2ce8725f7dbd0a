#include "cder/encoding/providers.hpp"

#include <cmath>
#include <numbers>

#include "cder/errors.hpp"

namespace cder::encoding {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform in (0, 1), never exactly 0.
double unit_open(std::uint64_t& state) {
  return (static_cast<double>(splitmix64(state) >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

}  // namespace

std::vector<double> ToyProvider::token_vector(const std::string& token) const {
  std::uint64_t state = fnv1a(token) ^ (seed_ * 0x9E3779B97F4A7C15ULL) ^ (static_cast<std::uint64_t>(dim_) << 32);
  const double sd = 1.0 / std::sqrt(static_cast<double>(dim_));
  std::vector<double> v(dim_);
  for (std::size_t i = 0; i < dim_; i += 2) {
    // Box-Muller; portable across standard libraries.
    const double u1 = unit_open(state);
    const double u2 = unit_open(state);
    const double r = std::sqrt(-2.0 * std::log(u1));
    v[i] = sd * r * std::cos(2.0 * std::numbers::pi * u2);
    if (i + 1 < dim_) v[i + 1] = sd * r * std::sin(2.0 * std::numbers::pi * u2);
  }
  return v;
}

EmbeddingBundle ToyProvider::provide(const data::Document&, const data::MarkedDocument& marked) const {
  const std::size_t n = marked.size();
  std::vector<std::vector<double>> raw;
  raw.reserve(n);
  for (const auto& tok : marked.tokens) raw.push_back(token_vector(tok));

  std::vector<double> H(n * dim_, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = std::min(n - 1, i + 1);
    const double count = static_cast<double>(hi - lo + 1);
    for (std::size_t k = lo; k <= hi; ++k)
      for (std::size_t j = 0; j < dim_; ++j) H[i * dim_ + j] += raw[k][j] / count;
  }

  EmbeddingBundle bundle;
  bundle.H = ad::Tensor::from({n, dim_}, std::move(H));
  for (std::size_t m = 0; m < marked.mention_marker_index.size(); ++m) {
    const auto [start, end] = marked.sentence_spans[marked.mention_sentence[m]];
    std::vector<double> row(n, 0.0);
    const double w = 1.0 / static_cast<double>(end - start);
    double assigned = 0.0;
    for (std::size_t i = start; i + 1 < end; ++i) assigned += (row[i] = w);
    // Last weight takes the remainder so the row sums to exactly 1.
    row[end - 1] = 1.0 - assigned;
    bundle.attention.push_back(std::move(row));
  }
  return bundle;
}

FileProvider::FileProvider(const std::filesystem::path& path, std::size_t expected_dim) {
  auto file = read_embedding_file(path);
  if (expected_dim != 0 && file.dim != expected_dim) {
    throw ConfigError("embedding file " + path.string() + " has d=" + std::to_string(file.dim) +
                      " but the configuration expects d=" + std::to_string(expected_dim));
  }
  dim_ = file.dim;
  for (auto& rec : file.documents) {
    auto title = rec.title;
    if (!records_.emplace(title, std::move(rec)).second) {
      throw ValidationError("embedding file has duplicate title '" + title + "'");
    }
  }
}

EmbeddingBundle FileProvider::provide(const data::Document& doc, const data::MarkedDocument& marked) const {
  const auto it = records_.find(doc.title);
  if (it == records_.end()) throw LookupError("no embeddings for document '" + doc.title + "'");
  const auto& rec = it->second;
  const std::size_t n = rec.tokens;
  if (n != marked.size()) {
    throw ValidationError("embeddings for '" + doc.title + "' have " + std::to_string(n) +
                          " tokens but the marked document has " + std::to_string(marked.size()));
  }
  if (rec.mention_entity.size() != marked.mention_entity.size()) {
    throw ValidationError("embeddings for '" + doc.title + "' have a different mention count");
  }
  EmbeddingBundle bundle;
  bundle.H = ad::Tensor::from({n, dim_}, std::vector<double>(rec.H.begin(), rec.H.end()));
  for (std::size_t m = 0; m < rec.attention.size(); ++m) {
    if (rec.mention_entity[m] != marked.mention_entity[m]) {
      throw ValidationError("embeddings for '" + doc.title + "': mention " + std::to_string(m) +
                            " belongs to a different entity");
    }
    std::vector<double> row(rec.attention[m].begin(), rec.attention[m].end());
    double total = 0.0;
    for (double v : row) {
      if (v < 0 || !std::isfinite(v)) throw ValidationError("invalid attention value in '" + doc.title + "'");
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-4) {
      throw ValidationError("attention row " + std::to_string(m) + " of '" + doc.title + "' sums to " +
                            std::to_string(total));
    }
    for (double& v : row) v /= total;
    bundle.attention.push_back(std::move(row));
  }
  return bundle;
}

std::unique_ptr<EmbeddingProvider> make_provider(const std::string& kind, std::size_t dim,
                                                 const std::filesystem::path& embeddings) {
  if (kind == "toy") return std::make_unique<ToyProvider>(dim);
  if (kind == "file") {
    if (embeddings.empty()) throw ConfigError("provider 'file' needs an embeddings path");
    return std::make_unique<FileProvider>(embeddings, dim);
  }
  throw ConfigError("unknown embedding provider '" + kind + "' (expected toy or file)");
}

}  // namespace cder::encoding
