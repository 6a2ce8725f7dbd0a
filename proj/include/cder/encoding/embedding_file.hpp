#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cder::encoding {

inline constexpr char kEmbeddingMagic[8] = {'C', 'D', 'E', 'R', 'E', 'M', 'B', '1'};
inline constexpr std::uint32_t kEmbeddingVersion = 1;

// One document of the embedding file. Values are float32 on disk.
struct EmbeddingRecord {
  std::string title;
  std::uint32_t tokens = 0;
  std::vector<float> H;  // tokens x d, row-major
  std::vector<std::uint32_t> mention_entity;
  std::vector<std::vector<float>> attention;  // per mention, `tokens` values
};

struct EmbeddingFile {
  std::uint32_t dim = 0;
  std::vector<EmbeddingRecord> documents;
};

// Layout (all integers u32 little-endian, floats IEEE-754 binary32 LE):
//   magic "CDEREMB1" | version | d | doc_count
//   per document: title_len | title bytes (UTF-8) | n | H (n*d floats)
//                 | m | per mention: entity index | n floats of attention
void write_embedding_file(const std::filesystem::path& path, const EmbeddingFile& file);
EmbeddingFile read_embedding_file(const std::filesystem::path& path);

}  // namespace cder::encoding
