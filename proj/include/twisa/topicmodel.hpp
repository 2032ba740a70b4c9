#pragma once

/**
 * Latent Dirichlet allocation fitted by collapsed Gibbs sampling.
 *
 * Notation used in comments below:
 *   K  topics, V  vocabulary size, D  documents, N  tokens
 *   n_dk  tokens of document d assigned to topic k
 *   n_kw  tokens of word w assigned to topic k
 *   n_k   tokens assigned to topic k
 *
 * Each token's topic is resampled from
 *   p(z = k | rest) ∝ (n_dk + alpha) (n_kw + beta) / (n_k + V beta)
 * with the token's own assignment removed from all three counts.
 *
 * Random stream: std::mt19937 seeded with the 32-bit config seed; every
 * uniform variate is a 53-bit double assembled from two 32-bit draws
 * (a >> 5, b >> 6), the same construction as MT19937's genrand_res53, so
 * traces are reproducible on any platform and from other languages.
 * Initial topics are floor(u K); documents are visited in index order and
 * tokens in position order.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "twisa/error.hpp"

namespace twisa {

using WordId = std::uint32_t;
using TopicId = std::uint32_t;

struct EncodedCorpus {
  std::vector<std::string> vocab;          // first-appearance order
  std::vector<std::vector<WordId>> docs;   // never empty
  std::vector<std::string> doc_ids;        // parallel to docs
  std::vector<std::size_t> dropped;        // input indices emptied by filtering

  std::size_t vocab_size() const { return vocab.size(); }
  std::size_t token_count() const {
    std::size_t n = 0;
    for (const auto& d : docs) n += d.size();
    return n;
  }
};

/// Removes stopwords and terms seen fewer than `min_count` times in the
/// whole input, then encodes the survivors. `doc_ids` may be empty, in
/// which case documents are named by their input index.
inline EncodedCorpus build_vocab(std::span<const std::vector<std::string>> docs,
                                 std::span<const std::string> doc_ids,
                                 const std::unordered_set<std::string>& stopwords,
                                 std::size_t min_count = 1) {
  if (!doc_ids.empty() && doc_ids.size() != docs.size())
    throw Error(ErrorKind::Validation, "doc_ids and docs differ in length");

  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& doc : docs)
    for (const auto& t : doc)
      if (!stopwords.count(t)) ++freq[t];

  EncodedCorpus out;
  std::unordered_map<std::string, WordId> index;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::vector<WordId> encoded;
    for (const auto& t : docs[d]) {
      if (stopwords.count(t)) continue;
      if (freq[t] < min_count) continue;
      auto [it, inserted] = index.try_emplace(t, WordId(out.vocab.size()));
      if (inserted) out.vocab.push_back(t);
      encoded.push_back(it->second);
    }
    if (encoded.empty()) {
      out.dropped.push_back(d);
      continue;
    }
    out.docs.push_back(std::move(encoded));
    out.doc_ids.push_back(doc_ids.empty() ? std::to_string(d) : doc_ids[d]);
  }
  if (out.docs.empty())
    throw Error(ErrorKind::EmptyCorpus, "every document is empty after stopword filtering");
  return out;
}

struct SamplerConfig {
  std::size_t topics = 25;
  double alpha = 0.2;  // per topic
  double beta = 0.01;
  std::size_t iterations = 1000;
  std::uint32_t seed = 0;

  /// Symmetric priors with a total document-topic mass of 5.
  static SamplerConfig with_topics(std::size_t k) {
    SamplerConfig c;
    c.topics = k;
    c.alpha = 5.0 / double(k);
    return c;
  }

  void validate() const {
    if (topics < 1) throw Error(ErrorKind::Validation, "topic count must be at least 1");
    if (!(alpha > 0) || !std::isfinite(alpha))
      throw Error(ErrorKind::Validation, "alpha must be positive");
    if (!(beta > 0) || !std::isfinite(beta))
      throw Error(ErrorKind::Validation, "beta must be positive");
    if (iterations < 1) throw Error(ErrorKind::Validation, "iterations must be at least 1");
  }
};

/// Portable uniform stream; see the header comment.
class UniformRng {
 public:
  explicit UniformRng(std::uint32_t seed) : engine_(seed) {}

  double next() {
    std::uint32_t a = engine_() >> 5;
    std::uint32_t b = engine_() >> 6;
    return (double(a) * 67108864.0 + double(b)) * (1.0 / 9007199254740992.0);
  }

 private:
  std::mt19937 engine_;
};

/// Fitted (or in-progress) sampler state. Counts are dense: n_kw is stored
/// word-major (row w holds K topic counts) so one token touches one row.
struct TopicModel {
  SamplerConfig config;
  std::vector<std::string> vocab;
  std::vector<std::string> doc_ids;
  std::vector<std::size_t> doc_offsets;  // D + 1 entries into words/z
  std::vector<WordId> words;
  std::vector<TopicId> z;
  std::vector<std::int32_t> n_dk;  // D x K
  std::vector<std::int32_t> n_kw;  // V x K
  std::vector<std::int32_t> n_k;   // K

  std::size_t topic_count() const { return config.topics; }
  std::size_t vocab_size() const { return vocab.size(); }
  std::size_t doc_count() const { return doc_ids.size(); }
  std::size_t token_count() const { return words.size(); }
  std::size_t doc_length(std::size_t d) const { return doc_offsets[d + 1] - doc_offsets[d]; }

  std::int32_t doc_topic(std::size_t d, std::size_t k) const { return n_dk[d * config.topics + k]; }
  std::int32_t topic_word(std::size_t k, std::size_t w) const {
    return n_kw[w * config.topics + k];
  }
};

/// Recomputes every count from the assignments and checks the stored ones,
/// plus the three conservation identities. Returns an empty string when
/// the state is consistent, otherwise a description of the first problem.
inline std::string count_violation(const TopicModel& m) {
  const std::size_t K = m.topic_count();
  for (auto t : m.z)
    if (t >= K) return "assignment out of range";
  for (std::size_t d = 0; d < m.doc_count(); ++d) {
    std::int64_t sum = 0;
    for (std::size_t k = 0; k < K; ++k) {
      if (m.doc_topic(d, k) < 0) return "negative n_dk";
      sum += m.doc_topic(d, k);
    }
    if (sum != std::int64_t(m.doc_length(d)))
      return "n_dk row " + std::to_string(d) + " does not sum to the document length";
  }
  std::int64_t grand = 0;
  for (std::size_t k = 0; k < K; ++k) {
    std::int64_t sum = 0;
    for (std::size_t w = 0; w < m.vocab_size(); ++w) {
      if (m.topic_word(k, w) < 0) return "negative n_kw";
      sum += m.topic_word(k, w);
    }
    if (sum != m.n_k[k]) return "n_kw row " + std::to_string(k) + " does not sum to n_k";
    grand += m.n_k[k];
  }
  if (grand != std::int64_t(m.token_count())) return "n_k does not sum to the token count";

  std::vector<std::int32_t> dk(m.n_dk.size(), 0), kw(m.n_kw.size(), 0);
  for (std::size_t d = 0; d < m.doc_count(); ++d)
    for (std::size_t i = m.doc_offsets[d]; i < m.doc_offsets[d + 1]; ++i) {
      ++dk[d * K + m.z[i]];
      ++kw[std::size_t(m.words[i]) * K + m.z[i]];
    }
  if (dk != m.n_dk) return "n_dk disagrees with assignments";
  if (kw != m.n_kw) return "n_kw disagrees with assignments";
  return {};
}

inline void verify_counts(const TopicModel& m) {
  if (auto v = count_violation(m); !v.empty())
    throw Error(ErrorKind::Validation, "count invariant broken: " + v);
}

/// Single-chain collapsed Gibbs sampler. The model is built and randomly
/// initialised on construction; each `sweep()` resamples every token once.
class LdaSampler {
 public:
  LdaSampler(const EncodedCorpus& corpus, const SamplerConfig& config) : rng_(config.seed) {
    config.validate();
    if (corpus.docs.empty()) throw Error(ErrorKind::EmptyCorpus, "corpus has no documents");
    const std::size_t tokens = corpus.token_count();
    if (config.topics > tokens)
      throw Error(ErrorKind::Overparameterized,
                  std::to_string(config.topics) + " topics for " + std::to_string(tokens) +
                      " tokens");

    const std::size_t K = config.topics;
    model_.config = config;
    model_.vocab = corpus.vocab;
    model_.doc_ids = corpus.doc_ids;
    model_.doc_offsets.reserve(corpus.docs.size() + 1);
    model_.doc_offsets.push_back(0);
    model_.words.reserve(tokens);
    for (const auto& doc : corpus.docs) {
      if (doc.empty()) throw Error(ErrorKind::EmptyCorpus, "corpus contains an empty document");
      for (auto w : doc) {
        if (w >= corpus.vocab.size())
          throw Error(ErrorKind::OutOfRange, "word id " + std::to_string(w) + " outside vocab");
        model_.words.push_back(w);
      }
      model_.doc_offsets.push_back(model_.words.size());
    }
    model_.z.resize(tokens);
    model_.n_dk.assign(corpus.docs.size() * K, 0);
    model_.n_kw.assign(corpus.vocab.size() * K, 0);
    model_.n_k.assign(K, 0);
    cumulative_.resize(K);
    beta_sum_ = double(corpus.vocab.size()) * config.beta;

    for (std::size_t d = 0; d < model_.doc_count(); ++d)
      for (std::size_t i = model_.doc_offsets[d]; i < model_.doc_offsets[d + 1]; ++i) {
        auto k = std::min<TopicId>(TopicId(K - 1), TopicId(rng_.next() * double(K)));
        model_.z[i] = k;
        add(d, model_.words[i], k);
      }
  }

  void sweep() {
    const std::size_t K = model_.config.topics;
    const double alpha = model_.config.alpha;
    const double beta = model_.config.beta;
    for (std::size_t d = 0; d < model_.doc_count(); ++d) {
      std::int32_t* ndk = &model_.n_dk[d * K];
      for (std::size_t i = model_.doc_offsets[d]; i < model_.doc_offsets[d + 1]; ++i) {
        const WordId w = model_.words[i];
        std::int32_t* nkw = &model_.n_kw[std::size_t(w) * K];
        const TopicId old = model_.z[i];
        --ndk[old];
        --nkw[old];
        --model_.n_k[old];

        double total = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          total += (double(ndk[k]) + alpha) * (double(nkw[k]) + beta) /
                   (double(model_.n_k[k]) + beta_sum_);
          cumulative_[k] = total;
        }
        const double u = rng_.next() * total;
        std::size_t k = 0;
        while (k + 1 < K && cumulative_[k] <= u) ++k;

        model_.z[i] = TopicId(k);
        ++ndk[k];
        ++nkw[k];
        ++model_.n_k[k];
      }
    }
    ++sweeps_;
  }

  std::size_t sweeps_done() const { return sweeps_; }
  const TopicModel& model() const { return model_; }
  TopicModel release() && { return std::move(model_); }

 private:
  void add(std::size_t d, WordId w, TopicId k) {
    const std::size_t K = model_.config.topics;
    ++model_.n_dk[d * K + k];
    ++model_.n_kw[std::size_t(w) * K + k];
    ++model_.n_k[k];
  }

  TopicModel model_;
  UniformRng rng_;
  std::vector<double> cumulative_;
  double beta_sum_ = 0.0;
  std::size_t sweeps_ = 0;
};

/// Called after each sweep with the 1-based sweep number.
using SweepObserver = std::function<void(std::size_t, const TopicModel&)>;

/// Runs `config.iterations` sweeps and returns the final state. Counts are
/// verified after initialisation and at the end; debug builds verify after
/// every sweep.
inline TopicModel fit(const EncodedCorpus& corpus, const SamplerConfig& config,
                      const SweepObserver& observer = {}) {
  LdaSampler sampler(corpus, config);
  verify_counts(sampler.model());
  for (std::size_t it = 1; it <= config.iterations; ++it) {
    sampler.sweep();
#ifndef NDEBUG
    verify_counts(sampler.model());
#endif
    if (observer) observer(it, sampler.model());
  }
  verify_counts(sampler.model());
  return std::move(sampler).release();
}

/// Row-major dense matrix of probabilities.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

/// Topic-word distributions, K x V: (n_kw + beta) / (n_k + V beta).
inline Matrix phi(const TopicModel& m) {
  const std::size_t K = m.topic_count(), V = m.vocab_size();
  Matrix out(K, V);
  const double denom_extra = double(V) * m.config.beta;
  for (std::size_t k = 0; k < K; ++k) {
    const double denom = double(m.n_k[k]) + denom_extra;
    for (std::size_t w = 0; w < V; ++w) out(k, w) = (double(m.topic_word(k, w)) + m.config.beta) / denom;
  }
  return out;
}

/// Document-topic distributions, D x K: (n_dk + alpha) / (len + K alpha).
inline Matrix theta(const TopicModel& m) {
  const std::size_t K = m.topic_count(), D = m.doc_count();
  Matrix out(D, K);
  for (std::size_t d = 0; d < D; ++d) {
    const double denom = double(m.doc_length(d)) + double(K) * m.config.alpha;
    for (std::size_t k = 0; k < K; ++k) out(d, k) = (double(m.doc_topic(d, k)) + m.config.alpha) / denom;
  }
  return out;
}

struct WeightedWord {
  std::string word;
  double probability;
};

/// The `n` most probable words of topic `k`; ties keep vocabulary order.
inline std::vector<WeightedWord> top_words(const TopicModel& m, std::size_t k, std::size_t n) {
  if (k >= m.topic_count())
    throw Error(ErrorKind::OutOfRange, "topic " + std::to_string(k) + " out of range");
  if (n < 1) throw Error(ErrorKind::Validation, "top-word count must be at least 1");
  const std::size_t V = m.vocab_size();
  std::vector<std::uint32_t> order(V);
  std::iota(order.begin(), order.end(), 0u);
  // phi is monotone in n_kw within a topic, so rank on counts.
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return m.topic_word(k, a) > m.topic_word(k, b);
  });
  n = std::min(n, V);
  const double denom = double(m.n_k[k]) + double(V) * m.config.beta;
  std::vector<WeightedWord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({m.vocab[order[i]], (double(m.topic_word(k, order[i])) + m.config.beta) / denom});
  return out;
}

/// argmax_k theta[d][k], lowest topic id on ties.
inline TopicId dominant_topic(const TopicModel& m, std::size_t d) {
  if (d >= m.doc_count())
    throw Error(ErrorKind::OutOfRange, "document " + std::to_string(d) + " out of range");
  TopicId best = 0;
  for (std::size_t k = 1; k < m.topic_count(); ++k)
    if (m.doc_topic(d, k) > m.doc_topic(d, best)) best = TopicId(k);
  return best;
}

namespace detail {

inline double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

}  // namespace detail

/// Collapsed joint log p(w, z) with theta and phi integrated out.
inline double log_likelihood(const TopicModel& m) {
  using detail::log_gamma;
  const std::size_t K = m.topic_count(), V = m.vocab_size(), D = m.doc_count();
  const double alpha = m.config.alpha, beta = m.config.beta;

  // Zero counts contribute nothing, so only non-zero cells are visited.
  double words = 0.0;
  const double lg_beta = log_gamma(beta);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t w = 0; w < V; ++w) {
      auto c = m.topic_word(k, w);
      if (c > 0) words += log_gamma(double(c) + beta) - lg_beta;
    }
    words -= log_gamma(double(m.n_k[k]) + double(V) * beta) - log_gamma(double(V) * beta);
  }

  double topics = 0.0;
  const double lg_alpha = log_gamma(alpha);
  for (std::size_t d = 0; d < D; ++d) {
    for (std::size_t k = 0; k < K; ++k) {
      auto c = m.doc_topic(d, k);
      if (c > 0) topics += log_gamma(double(c) + alpha) - lg_alpha;
    }
    topics -= log_gamma(double(m.doc_length(d)) + double(K) * alpha) - log_gamma(double(K) * alpha);
  }
  return words + topics;
}

}  // namespace twisa
