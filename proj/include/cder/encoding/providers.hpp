#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <unordered_map>

#include "cder/data/document.hpp"
#include "cder/data/markers.hpp"
#include "cder/encoding/bundle.hpp"
#include "cder/encoding/embedding_file.hpp"

namespace cder::encoding {

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual EmbeddingBundle provide(const data::Document& doc, const data::MarkedDocument& marked) const = 0;
  virtual std::size_t dim() const = 0;
  // True if provide() can serve this document.
  virtual bool has(const data::Document& doc) const = 0;
};

// Deterministic embeddings with no model behind them: each token string
// hashes to an N(0, 1/d) vector, then one pass of neighbour averaging mixes
// in context. A mention's attention is uniform over its own sentence.
class ToyProvider final : public EmbeddingProvider {
 public:
  explicit ToyProvider(std::size_t dim, std::uint64_t seed = 0) : dim_(dim), seed_(seed) {}

  EmbeddingBundle provide(const data::Document& doc, const data::MarkedDocument& marked) const override;
  std::size_t dim() const override { return dim_; }
  bool has(const data::Document&) const override { return true; }

  std::vector<double> token_vector(const std::string& token) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

// Serves bundles from an embedding file written by the exporter.
class FileProvider final : public EmbeddingProvider {
 public:
  // Throws ConfigError when the file's dimension differs from expected_dim
  // (pass 0 to accept the file's dimension).
  FileProvider(const std::filesystem::path& path, std::size_t expected_dim);

  EmbeddingBundle provide(const data::Document& doc, const data::MarkedDocument& marked) const override;
  std::size_t dim() const override { return dim_; }
  bool has(const data::Document& doc) const override { return records_.count(doc.title) > 0; }

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, EmbeddingRecord> records_;
};

std::unique_ptr<EmbeddingProvider> make_provider(const std::string& kind, std::size_t dim,
                                                 const std::filesystem::path& embeddings = {});

}  // namespace cder::encoding
