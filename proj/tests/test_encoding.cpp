#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "cder/autodiff/gradcheck.hpp"
#include "cder/autodiff/ops.hpp"
#include "cder/data/markers.hpp"
#include "cder/data/synthetic.hpp"
#include "cder/encoding/embedding_file.hpp"
#include "cder/encoding/providers.hpp"
#include "cder/encoding/representations.hpp"
#include "cder/errors.hpp"
#include "support.hpp"

using namespace cder;
using namespace cder::encoding;

namespace {

// Random H and one-hot-free random attention rows for a marked document.
EmbeddingBundle random_bundle(const data::MarkedDocument& marked, std::size_t d, std::mt19937_64& rng) {
  EmbeddingBundle b;
  b.H = test::random_tensor({marked.size(), d}, rng, 1.0, false);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t m = 0; m < marked.mention_entity.size(); ++m) {
    std::vector<double> row(marked.size());
    double total = 0;
    for (auto& v : row) total += (v = u(rng));
    for (auto& v : row) v /= total;
    b.attention.push_back(row);
  }
  return b;
}

std::vector<double> oracle_logsumexp(const std::vector<std::vector<double>>& rows) {
  std::vector<double> out(rows.front().size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    long double m = -INFINITY;
    for (const auto& r : rows) m = std::max<long double>(m, r[j]);
    long double s = 0;
    for (const auto& r : rows) s += std::exp(static_cast<long double>(r[j]) - m);
    out[j] = static_cast<double>(m + std::log(s));
  }
  return out;
}

std::vector<double> row_of(const ad::Tensor& H, std::size_t i) {
  return {H.data().begin() + i * H.cols(), H.data().begin() + (i + 1) * H.cols()};
}

}  // namespace

TEST(ToyProvider, DeterministicAndNormalised) {
  const auto doc = test::figure1();
  const auto marked = data::insert_markers(doc);
  const ToyProvider a(16), b(16);
  const auto x = a.provide(doc, marked);
  const auto y = b.provide(doc, marked);
  ASSERT_EQ(x.H.shape(), (ad::Shape{marked.size(), 16}));
  EXPECT_EQ(test::max_abs_diff(x.H.data(), y.H.data()), 0.0);
  ASSERT_EQ(x.attention.size(), doc.mention_count());
  for (const auto& row : x.attention) {
    double total = 0;
    for (double v : row) total += v;
    EXPECT_EQ(total, 1.0);
  }
}

TEST(EmbeddingFile, RoundTrip) {
  std::mt19937_64 rng(4);
  std::normal_distribution<float> n(0.0f, 1.0f);
  EmbeddingFile file;
  file.dim = 5;
  for (int doc = 0; doc < 3; ++doc) {
    EmbeddingRecord r;
    r.title = "doc-" + std::to_string(doc) + "-ü";
    r.tokens = 7 + doc;
    for (std::size_t i = 0; i < r.tokens * file.dim; ++i) r.H.push_back(n(rng));
    for (std::uint32_t m = 0; m < 2; ++m) {
      r.mention_entity.push_back(m);
      std::vector<float> a(r.tokens, 1.0f / static_cast<float>(r.tokens));
      r.attention.push_back(a);
    }
    file.documents.push_back(r);
  }
  const auto path = std::filesystem::temp_directory_path() / "cder_emb.bin";
  write_embedding_file(path, file);
  // header 20 bytes; per doc 4+title, 4, n*d*4, 4, m*(4+n*4)
  std::size_t expected = 20;
  for (const auto& r : file.documents)
    expected += 4 + r.title.size() + 4 + r.H.size() * 4 + 4 + r.attention.size() * (4 + r.tokens * 4);
  EXPECT_EQ(std::filesystem::file_size(path), expected);
  const auto back = read_embedding_file(path);
  ASSERT_EQ(back.dim, file.dim);
  ASSERT_EQ(back.documents.size(), 3u);
  for (std::size_t d = 0; d < 3; ++d) {
    EXPECT_EQ(back.documents[d].title, file.documents[d].title);
    EXPECT_EQ(back.documents[d].H, file.documents[d].H);
    EXPECT_EQ(back.documents[d].attention, file.documents[d].attention);
    EXPECT_EQ(back.documents[d].mention_entity, file.documents[d].mention_entity);
  }
  std::filesystem::remove(path);
}

TEST(EmbeddingFile, RejectsBadInput) {
  const auto path = std::filesystem::temp_directory_path() / "cder_emb_bad.bin";
  { std::ofstream(path) << "NOTMAGIC...."; }
  EXPECT_THROW(read_embedding_file(path), ParseError);
  EmbeddingFile file;
  file.dim = 2;
  file.documents.push_back({"x", 2, {1, 2, 3, 4}, {0}, {{0.5f, 0.5f}}});
  write_embedding_file(path, file);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 3);
  EXPECT_THROW(read_embedding_file(path), ParseError);
  std::filesystem::remove(path);
}

TEST(FileProvider, ServesExportedDocuments) {
  const auto doc = test::figure1();
  const auto marked = data::insert_markers(doc);
  const ToyProvider toy(4);
  const auto bundle = toy.provide(doc, marked);
  EmbeddingFile file;
  file.dim = 4;
  EmbeddingRecord r;
  r.title = doc.title;
  r.tokens = static_cast<std::uint32_t>(marked.size());
  for (double v : bundle.H.data()) r.H.push_back(static_cast<float>(v));
  for (std::size_t m = 0; m < bundle.attention.size(); ++m) {
    r.mention_entity.push_back(static_cast<std::uint32_t>(marked.mention_entity[m]));
    r.attention.emplace_back(bundle.attention[m].begin(), bundle.attention[m].end());
  }
  file.documents.push_back(r);
  const auto path = std::filesystem::temp_directory_path() / "cder_emb_provider.bin";
  write_embedding_file(path, file);
  EXPECT_THROW(FileProvider(path, 8), ConfigError);
  const FileProvider provider(path, 4);
  EXPECT_TRUE(provider.has(doc));
  const auto served = provider.provide(doc, marked);
  EXPECT_LT(test::max_abs_diff(served.H.data(), bundle.H.data()), 1e-6);
  auto other = doc;
  other.title = "missing";
  EXPECT_FALSE(provider.has(other));
  EXPECT_THROW(provider.provide(other, marked), LookupError);
  std::filesystem::remove(path);
}

TEST(EntityEmbedding, Examples) {
  const auto doc = test::figure1();
  const auto marked = data::insert_markers(doc);
  std::mt19937_64 rng(2);
  auto bundle = random_bundle(marked, 6, rng);
  // Weser River has a single mention
  const auto single = entity_embedding(0, bundle, marked);
  EXPECT_EQ(test::max_abs_diff(single.data(), row_of(bundle.H, marked.entity_marker_indices(0)[0])), 0.0);
  // Germany: make both marker rows equal
  const auto idx = marked.entity_marker_indices(1);
  auto H = bundle.H.mutable_data();
  for (std::size_t j = 0; j < 6; ++j) H[idx[1] * 6 + j] = H[idx[0] * 6 + j];
  const auto twice = entity_embedding(1, bundle, marked);
  for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(twice[j], H[idx[0] * 6 + j] + std::log(2.0), 1e-12);
}

TEST(EntityEmbedding, MatchesOracleAndBounds) {
  const auto doc = test::figure1();
  const auto marked = data::insert_markers(doc);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto bundle = random_bundle(marked, 6, rng);
    std::vector<std::vector<double>> rows;
    for (auto i : marked.entity_marker_indices(3)) rows.push_back(row_of(bundle.H, i));  // AFRTS, 3 mentions
    const auto e = entity_embedding(3, bundle, marked);
    EXPECT_LT(test::max_abs_diff(e.data(), oracle_logsumexp(rows)), 1e-9);
    for (std::size_t j = 0; j < 6; ++j) {
      double mx = -INFINITY;
      for (const auto& r : rows) mx = std::max(mx, r[j]);
      EXPECT_GE(e[j], mx);
      EXPECT_LE(e[j], mx + std::log(3.0) + 1e-12);
    }
  }
}

TEST(LocalizedContext, Examples) {
  const auto doc = test::figure1();
  const auto marked = data::insert_markers(doc);
  std::mt19937_64 rng(3);
  auto bundle = random_bundle(marked, 5, rng);
  const std::size_t n = marked.size();
  std::vector<double> col_mean(5, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 5; ++j) col_mean[j] += bundle.H.at(i, j) / static_cast<double>(n);

  for (auto& row : bundle.attention) std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(n));
  EXPECT_LT(test::max_abs_diff(localized_context(0, 1, bundle, marked).data(), col_mean), 1e-12);

  const std::size_t k = 7;
  for (auto& row : bundle.attention) {
    std::fill(row.begin(), row.end(), 0.0);
    row[k] = 1.0;
  }
  EXPECT_LT(test::max_abs_diff(localized_context(0, 1, bundle, marked).data(), row_of(bundle.H, k)), 1e-12);

  // disjoint supports: head on token 1, every other mention on token 2
  for (std::size_t m = 0; m < bundle.attention.size(); ++m) {
    std::fill(bundle.attention[m].begin(), bundle.attention[m].end(), 0.0);
    bundle.attention[m][marked.mention_entity[m] == 0 ? 1 : 2] = 1.0;
  }
  EXPECT_TRUE(context_weights(0, 1, bundle, marked).fallback);
  EXPECT_LT(test::max_abs_diff(localized_context(0, 1, bundle, marked).data(), col_mean), 1e-12);
}

TEST(PairRep, Examples) {
  std::mt19937_64 rng(6);
  const std::size_t d = 4;
  EncoderParams zero{ad::Tensor::zeros({d, 3 * d}, true), ad::Tensor::zeros({d}, true)};
  const auto e_h = test::random_tensor({d}, rng, 1.0, false);
  const auto e_t = test::random_tensor({d}, rng, 1.0, false);
  const auto c = test::random_tensor({d}, rng, 1.0, false);
  const auto zero_out = pair_rep(e_h, e_t, c, zero);
  for (double v : zero_out.data()) EXPECT_EQ(v, 0.0);

  const auto params = EncoderParams::init(d, rng);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = pair_rep(test::random_tensor({d}, rng, 3.0, false), test::random_tensor({d}, rng, 3.0, false),
                            test::random_tensor({d}, rng, 3.0, false), params);
    for (double v : p.data()) {
      EXPECT_GT(v, -1.0);
      EXPECT_LT(v, 1.0);
    }
  }
  EXPECT_LT(ad::gradient_check([&] { return ad::sum(pair_rep(e_h, e_t, c, params)); }, {params.W_p, params.b_p}),
            1e-6);
  // batched form agrees
  const auto batched = pair_reps(ad::reshape(ad::concat({e_h, e_t, c}, 0), {1, 3 * d}), params);
  EXPECT_LT(test::max_abs_diff(batched.data(), pair_rep(e_h, e_t, c, params).data()), 1e-14);
}

TEST(SentenceRep, Examples) {
  const auto doc = test::figure1();
  const auto marked = data::insert_markers(doc);
  std::mt19937_64 rng(12);
  auto bundle = random_bundle(marked, 3, rng);
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const auto [start, end] = marked.sentence_spans[s];
    std::vector<double> mean(3, 0.0);
    for (std::size_t i = start; i < end; ++i)
      for (std::size_t j = 0; j < 3; ++j) mean[j] += bundle.H.at(i, j);
    for (auto& v : mean) v /= static_cast<double>(end - start);
    EXPECT_LT(test::max_abs_diff(sentence_rep(s, bundle, marked).data(), mean), 1e-12);
  }
  auto H = bundle.H.mutable_data();
  const auto [start, end] = marked.sentence_spans[3];
  for (std::size_t i = start; i < end; ++i)
    for (std::size_t j = 0; j < 3; ++j) H[i * 3 + j] = 0.25 * static_cast<double>(j + 1);
  EXPECT_LT(test::max_abs_diff(sentence_rep(3, bundle, marked).data(), std::vector<double>{0.25, 0.5, 0.75}), 1e-15);
}
