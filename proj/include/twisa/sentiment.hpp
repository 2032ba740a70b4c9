#pragma once

// Word-count sentiment: tokens are matched against positive and negative
// term lists and the majority polarity wins.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "twisa/dates.hpp"
#include "twisa/error.hpp"

namespace twisa {

enum class Polarity { Positive, Negative };

/// One polarity's entries: exact terms plus stem wildcards ("sad*").
class TermSet {
 public:
  static constexpr std::size_t kMinStemLength = 2;

  void add(std::string_view entry) {
    if (!entry.empty() && entry.back() == '*')
      stems_.emplace(entry.substr(0, entry.size() - 1));
    else
      exact_.emplace(entry);
  }

  bool matches(std::string_view token) const {
    if (exact_.count(std::string(token))) return true;
    if (stems_.empty()) return false;
    for (std::size_t len = kMinStemLength; len <= token.size(); ++len)
      if (stems_.count(std::string(token.substr(0, len)))) return true;
    return false;
  }

  bool contains_entry(std::string_view entry) const {
    if (!entry.empty() && entry.back() == '*')
      return stems_.count(std::string(entry.substr(0, entry.size() - 1))) != 0;
    return exact_.count(std::string(entry)) != 0;
  }

  std::size_t size() const { return exact_.size() + stems_.size(); }
  bool empty() const { return size() == 0; }

 private:
  std::unordered_set<std::string> exact_;
  std::unordered_set<std::string> stems_;
};

class Lexicon {
 public:
  Lexicon() = default;

  /// Validates and adds an entry. Entries are lower-cased; '*' may only
  /// appear once, at the end, after a stem of at least two characters.
  void add(Polarity polarity, std::string_view raw) {
    std::string entry(raw);
    std::transform(entry.begin(), entry.end(), entry.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (entry.empty()) throw Error(ErrorKind::Format, "empty lexicon entry");
    auto star = entry.find('*');
    if (star != std::string::npos && star != entry.size() - 1)
      throw Error(ErrorKind::Format, "wildcard must end the entry: '" + entry + "'");
    if (star != std::string::npos && star < TermSet::kMinStemLength)
      throw Error(ErrorKind::Format, "wildcard stem shorter than 2 characters: '" + entry + "'");
    if (entry.find_first_of(" \t") != std::string::npos)
      throw Error(ErrorKind::Format, "lexicon entry contains whitespace: '" + entry + "'");
    const TermSet& other = polarity == Polarity::Positive ? negative_ : positive_;
    if (other.contains_entry(entry))
      throw Error(ErrorKind::Conflict, "'" + entry + "' listed as both positive and negative");
    (polarity == Polarity::Positive ? positive_ : negative_).add(entry);
  }

  const TermSet& positive() const { return positive_; }
  const TermSet& negative() const { return negative_; }

 private:
  TermSet positive_;
  TermSet negative_;
};

/// Reads the sectioned lexicon format: `[positive]` / `[negative]` headers,
/// one entry per line, ';' comment lines, blank lines ignored.
inline Lexicon load_lexicon(std::istream& in) {
  Lexicon lex;
  enum class Section { None, Positive, Negative } section = Section::None;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    std::string_view body(line.data() + first, last - first + 1);
    if (body.front() == ';') continue;
    if (body.front() == '[') {
      std::string name(body);
      std::transform(name.begin(), name.end(), name.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (name == "[positive]")
        section = Section::Positive;
      else if (name == "[negative]")
        section = Section::Negative;
      else
        throw RecordError(ErrorKind::Format, line_no, "unknown section " + name);
      continue;
    }
    if (section == Section::None)
      throw RecordError(ErrorKind::Format, line_no, "entry outside of a section");
    try {
      lex.add(section == Section::Positive ? Polarity::Positive : Polarity::Negative, body);
    } catch (const RecordError&) {
      throw;
    } catch (const Error& e) {
      throw RecordError(e.kind(), line_no, std::string(body));
    }
  }
  if (lex.positive().empty())
    throw Error(ErrorKind::EmptyPolarity, "lexicon has no positive entries");
  if (lex.negative().empty())
    throw Error(ErrorKind::EmptyPolarity, "lexicon has no negative entries");
  return lex;
}

struct SentimentScore {
  std::uint32_t pos_count = 0;
  std::uint32_t neg_count = 0;

  friend bool operator==(const SentimentScore&, const SentimentScore&) = default;
};

enum class SentimentLabel { Negative, Neutral, Positive };

inline const char* to_string(SentimentLabel label) {
  switch (label) {
    case SentimentLabel::Negative: return "negative";
    case SentimentLabel::Neutral: return "neutral";
    case SentimentLabel::Positive: return "positive";
  }
  return "?";
}

constexpr std::array<SentimentLabel, 3> kAllLabels = {
    SentimentLabel::Negative, SentimentLabel::Neutral, SentimentLabel::Positive};

/// Repeated tokens count repeatedly.
inline SentimentScore score(std::span<const std::string> tokens, const Lexicon& lex) {
  SentimentScore s;
  for (const auto& t : tokens) {
    if (lex.positive().matches(t)) ++s.pos_count;
    if (lex.negative().matches(t)) ++s.neg_count;
  }
  return s;
}

/// Ties, including (0,0), are neutral.
constexpr SentimentLabel classify(SentimentScore s) {
  if (s.neg_count > s.pos_count) return SentimentLabel::Negative;
  if (s.pos_count > s.neg_count) return SentimentLabel::Positive;
  return SentimentLabel::Neutral;
}

struct DayLabel {
  Day day;
  SentimentLabel label;
};

struct SentimentSummary {
  std::array<std::size_t, 3> totals{};  // indexed by SentimentLabel
  std::vector<std::size_t> negative_per_day;

  std::size_t total(SentimentLabel l) const { return totals[static_cast<std::size_t>(l)]; }
  std::size_t corpus_size() const { return totals[0] + totals[1] + totals[2]; }

  /// Share of the corpus in percent, unrounded. Zero for an empty corpus.
  double percentage(SentimentLabel l) const {
    auto n = corpus_size();
    return n == 0 ? 0.0 : 100.0 * double(total(l)) / double(n);
  }

  std::size_t min_negative() const {
    return negative_per_day.empty()
               ? 0
               : *std::min_element(negative_per_day.begin(), negative_per_day.end());
  }
  std::size_t max_negative() const {
    return negative_per_day.empty()
               ? 0
               : *std::max_element(negative_per_day.begin(), negative_per_day.end());
  }
  double mean_negative() const {
    if (negative_per_day.empty()) return 0.0;
    double sum = 0;
    for (auto n : negative_per_day) sum += double(n);
    return sum / double(negative_per_day.size());
  }

  SentimentSummary& operator+=(const SentimentSummary& other) {
    if (negative_per_day.size() < other.negative_per_day.size())
      negative_per_day.resize(other.negative_per_day.size(), 0);
    for (std::size_t i = 0; i < 3; ++i) totals[i] += other.totals[i];
    for (std::size_t i = 0; i < other.negative_per_day.size(); ++i)
      negative_per_day[i] += other.negative_per_day[i];
    return *this;
  }
};

inline SentimentSummary summarize(std::span<const DayLabel> labels, const DateWindow& window) {
  SentimentSummary s;
  s.negative_per_day.assign(window.day_count(), 0);
  for (const auto& l : labels) {
    if (!window.contains(l.day))
      throw Error(ErrorKind::Validation, "labeled tweet on " + format_day(l.day) +
                                             " lies outside the window");
    ++s.totals[static_cast<std::size_t>(l.label)];
    if (l.label == SentimentLabel::Negative) ++s.negative_per_day[window.index_of(l.day)];
  }
  return s;
}

/// Renders a percentage to two decimals, rounding half to even on the
/// scaled value.
inline std::string format_percent(double pct) {
  double scaled = std::nearbyint(pct * 100.0);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", scaled / 100.0);
  return buf;
}

}  // namespace twisa
