#pragma once

// Plain-text model dumps. A dump holds the sampler configuration, the
// vocabulary, sparse n_kw and n_dk rows and every token's assignment, so a
// reloaded model reproduces phi and theta exactly.
//
//   twisa-model 1
//   label <free text, no newline>
//   topics K / alpha a / beta b / iterations n / seed s
//   vocab V / documents D / tokens N
//   [vocab]        V lines, one word each
//   [topic_word]   K lines of "w:count" pairs (non-zero cells only)
//   [doc_topic]    D lines of "k:count" pairs
//   [assignments]  D lines: "<doc id>\t<w:k w:k ...>"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "twisa/error.hpp"
#include "twisa/topicmodel.hpp"

namespace twisa {

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_model_dump(std::ostream& out, const TopicModel& m, const std::string& label) {
  if (label.find('\n') != std::string::npos)
    throw Error(ErrorKind::Format, "model label contains a newline");
  const std::size_t K = m.topic_count();
  out << "twisa-model 1\n";
  out << "label " << label << '\n';
  out << "topics " << K << '\n';
  out << "alpha " << detail::format_double(m.config.alpha) << '\n';
  out << "beta " << detail::format_double(m.config.beta) << '\n';
  out << "iterations " << m.config.iterations << '\n';
  out << "seed " << m.config.seed << '\n';
  out << "vocab " << m.vocab_size() << '\n';
  out << "documents " << m.doc_count() << '\n';
  out << "tokens " << m.token_count() << '\n';

  out << "[vocab]\n";
  for (const auto& w : m.vocab) out << w << '\n';

  out << "[topic_word]\n";
  for (std::size_t k = 0; k < K; ++k) {
    bool first = true;
    for (std::size_t w = 0; w < m.vocab_size(); ++w) {
      auto c = m.topic_word(k, w);
      if (c == 0) continue;
      out << (first ? "" : " ") << w << ':' << c;
      first = false;
    }
    out << '\n';
  }

  out << "[doc_topic]\n";
  for (std::size_t d = 0; d < m.doc_count(); ++d) {
    bool first = true;
    for (std::size_t k = 0; k < K; ++k) {
      auto c = m.doc_topic(d, k);
      if (c == 0) continue;
      out << (first ? "" : " ") << k << ':' << c;
      first = false;
    }
    out << '\n';
  }

  out << "[assignments]\n";
  for (std::size_t d = 0; d < m.doc_count(); ++d) {
    const auto& id = m.doc_ids[d];
    if (id.find_first_of("\t\n\r") != std::string::npos)
      throw Error(ErrorKind::Format, "document id contains a tab or newline");
    out << id << '\t';
    for (std::size_t i = m.doc_offsets[d]; i < m.doc_offsets[d + 1]; ++i)
      out << (i == m.doc_offsets[d] ? "" : " ") << m.words[i] << ':' << m.z[i];
    out << '\n';
  }
}

struct LoadedModel {
  std::string label;
  TopicModel model;
};

namespace detail {

class DumpReader {
 public:
  explicit DumpReader(std::istream& in) : in_(in) {}

  std::string line() {
    std::string s;
    if (!std::getline(in_, s)) fail("unexpected end of dump");
    ++line_no_;
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
  }

  std::string field(const std::string& key) {
    auto s = line();
    if (s.compare(0, key.size() + 1, key + " ") != 0) fail("expected '" + key + "'");
    return s.substr(key.size() + 1);
  }

  template <class T>
  T number(const std::string& key) {
    std::istringstream is(field(key));
    T v{};
    if (!(is >> v) || !is.eof()) fail("bad value for '" + key + "'");
    return v;
  }

  void expect(const std::string& text) {
    if (line() != text) fail("expected '" + text + "'");
  }

  // Parses "a:b a:b ..." into pairs.
  std::vector<std::pair<std::size_t, std::int64_t>> pairs(const std::string& s) {
    std::vector<std::pair<std::size_t, std::int64_t>> out;
    std::istringstream is(s);
    std::string item;
    while (is >> item) {
      auto colon = item.find(':');
      if (colon == std::string::npos) fail("bad pair '" + item + "'");
      try {
        std::size_t used = 0;
        auto a = std::stoull(item.substr(0, colon), &used);
        if (used != colon) fail("bad pair '" + item + "'");
        auto b = std::stoll(item.substr(colon + 1), &used);
        if (used != item.size() - colon - 1) fail("bad pair '" + item + "'");
        out.emplace_back(std::size_t(a), std::int64_t(b));
      } catch (const std::logic_error&) {
        fail("bad pair '" + item + "'");
      }
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw RecordError(ErrorKind::Format, line_no_, msg);
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace detail

/// Reads a dump written by write_model_dump. The stored count sections are
/// cross-checked against counts rebuilt from the assignments.
inline LoadedModel read_model_dump(std::istream& in) {
  detail::DumpReader r(in);
  r.expect("twisa-model 1");
  LoadedModel out;
  out.label = r.field("label");
  TopicModel& m = out.model;
  m.config.topics = r.number<std::size_t>("topics");
  m.config.alpha = r.number<double>("alpha");
  m.config.beta = r.number<double>("beta");
  m.config.iterations = r.number<std::size_t>("iterations");
  m.config.seed = r.number<std::uint32_t>("seed");
  try {
    m.config.validate();
  } catch (const Error& e) {
    r.fail(e.what());
  }
  const auto V = r.number<std::size_t>("vocab");
  const auto D = r.number<std::size_t>("documents");
  const auto N = r.number<std::size_t>("tokens");
  const std::size_t K = m.config.topics;

  r.expect("[vocab]");
  m.vocab.reserve(V);
  for (std::size_t w = 0; w < V; ++w) m.vocab.push_back(r.line());

  std::vector<std::int32_t> stored_kw(V * K, 0), stored_dk(D * K, 0);
  r.expect("[topic_word]");
  for (std::size_t k = 0; k < K; ++k)
    for (auto [w, c] : r.pairs(r.line())) {
      if (w >= V) r.fail("word id out of range");
      stored_kw[w * K + k] = std::int32_t(c);
    }
  r.expect("[doc_topic]");
  for (std::size_t d = 0; d < D; ++d)
    for (auto [k, c] : r.pairs(r.line())) {
      if (k >= K) r.fail("topic id out of range");
      stored_dk[d * K + k] = std::int32_t(c);
    }

  r.expect("[assignments]");
  m.doc_offsets.push_back(0);
  m.words.reserve(N);
  m.z.reserve(N);
  m.n_dk.assign(D * K, 0);
  m.n_kw.assign(V * K, 0);
  m.n_k.assign(K, 0);
  for (std::size_t d = 0; d < D; ++d) {
    auto s = r.line();
    auto tab = s.find('\t');
    if (tab == std::string::npos) r.fail("assignment line without a document id");
    m.doc_ids.push_back(s.substr(0, tab));
    for (auto [w, k] : r.pairs(s.substr(tab + 1))) {
      if (w >= V || k < 0 || std::size_t(k) >= K) r.fail("assignment out of range");
      m.words.push_back(WordId(w));
      m.z.push_back(TopicId(k));
      ++m.n_dk[d * K + std::size_t(k)];
      ++m.n_kw[w * K + std::size_t(k)];
      ++m.n_k[std::size_t(k)];
    }
    if (m.words.size() == m.doc_offsets.back()) r.fail("empty document");
    m.doc_offsets.push_back(m.words.size());
  }
  if (m.words.size() != N) r.fail("token count does not match header");
  if (stored_kw != m.n_kw) r.fail("topic_word section disagrees with assignments");
  if (stored_dk != m.n_dk) r.fail("doc_topic section disagrees with assignments");
  return out;
}

/// Human-readable listing of the top words of every topic.
inline void write_topic_listing(std::ostream& out, const TopicModel& m, const std::string& label,
                                std::size_t words_per_topic = 20) {
  out << "# " << label << ": " << m.topic_count() << " topics, " << m.doc_count()
      << " documents, " << m.token_count() << " tokens\n";
  for (std::size_t k = 0; k < m.topic_count(); ++k) {
    out << "\nTopic " << k << " (" << m.n_k[k] << " tokens)\n";
    for (const auto& ww : top_words(m, k, words_per_topic)) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", ww.probability);
      out << "  " << ww.word << '\t' << buf << '\n';
    }
  }
}

}  // namespace twisa
