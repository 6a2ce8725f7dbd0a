#include "cder/encoding/embedding_file.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "cder/errors.hpp"

namespace cder::encoding {

namespace {

class Writer {
 public:
  explicit Writer(std::ofstream& out) : out_(out) {}

  void u32(std::uint32_t v) {
    const std::array<char, 4> bytes{static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                                    static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    out_.write(bytes.data(), 4);
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void raw(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }

 private:
  std::ofstream& out_;
};

class Reader {
 public:
  Reader(std::vector<char> bytes, std::string source) : bytes_(std::move(bytes)), source_(std::move(source)) {}

  std::uint32_t u32() {
    need(4, "u32");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(bytes_[pos_ + static_cast<std::size_t>(i)]);
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str(std::size_t n) {
    need(n, "string");
    std::string s(bytes_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw ParseError(source_ + ": truncated embedding file while reading " + what + " at byte " +
                       std::to_string(pos_));
    }
  }

  std::vector<char> bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_embedding_file(const std::filesystem::path& path, const EmbeddingFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write embedding file " + path.string());
  Writer w(out);
  w.raw(kEmbeddingMagic, sizeof(kEmbeddingMagic));
  w.u32(kEmbeddingVersion);
  w.u32(file.dim);
  w.u32(static_cast<std::uint32_t>(file.documents.size()));
  for (const auto& doc : file.documents) {
    if (doc.H.size() != static_cast<std::size_t>(doc.tokens) * file.dim) {
      throw ValidationError("embedding record '" + doc.title + "' has H of wrong size");
    }
    if (doc.attention.size() != doc.mention_entity.size()) {
      throw ValidationError("embedding record '" + doc.title + "' has mismatched mention arrays");
    }
    w.u32(static_cast<std::uint32_t>(doc.title.size()));
    w.raw(doc.title.data(), doc.title.size());
    w.u32(doc.tokens);
    for (float v : doc.H) w.f32(v);
    w.u32(static_cast<std::uint32_t>(doc.mention_entity.size()));
    for (std::size_t m = 0; m < doc.mention_entity.size(); ++m) {
      if (doc.attention[m].size() != doc.tokens) {
        throw ValidationError("embedding record '" + doc.title + "' has an attention row of wrong length");
      }
      w.u32(doc.mention_entity[m]);
      for (float v : doc.attention[m]) w.f32(v);
    }
  }
  if (!out) throw ParseError("failed writing embedding file " + path.string());
}

EmbeddingFile read_embedding_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open embedding file " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(std::move(bytes), path.string());

  if (r.str(sizeof(kEmbeddingMagic)) != std::string(kEmbeddingMagic, sizeof(kEmbeddingMagic))) {
    throw ParseError(path.string() + ": bad magic, not a CDEREMB1 file");
  }
  const auto version = r.u32();
  if (version != kEmbeddingVersion) {
    throw ParseError(path.string() + ": unsupported version " + std::to_string(version));
  }
  EmbeddingFile file;
  file.dim = r.u32();
  const auto count = r.u32();
  file.documents.reserve(count);
  for (std::uint32_t d = 0; d < count; ++d) {
    EmbeddingRecord rec;
    rec.title = r.str(r.u32());
    rec.tokens = r.u32();
    rec.H.resize(static_cast<std::size_t>(rec.tokens) * file.dim);
    for (auto& v : rec.H) v = r.f32();
    const auto mentions = r.u32();
    for (std::uint32_t m = 0; m < mentions; ++m) {
      rec.mention_entity.push_back(r.u32());
      std::vector<float> row(rec.tokens);
      for (auto& v : row) v = r.f32();
      rec.attention.push_back(std::move(row));
    }
    file.documents.push_back(std::move(rec));
  }
  if (!r.at_end()) throw ParseError(path.string() + ": trailing bytes after last document");
  return file;
}

}  // namespace cder::encoding
