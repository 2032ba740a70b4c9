#pragma once

// Per-day topic models and the category-by-day aggregation built on the
// human-assigned topic categories.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "twisa/dates.hpp"
#include "twisa/error.hpp"
#include "twisa/sentiment.hpp"
#include "twisa/topicmodel.hpp"

namespace twisa {

/// Documents of one day, already normalized.
struct DayDocuments {
  Day day;
  std::vector<std::vector<std::string>> docs;
  std::vector<std::string> ids;
};

struct DailyModel {
  Day day;
  TopicModel model;
};

/// Fits one model per day. Day i of the window is seeded with
/// `config.seed + i`, so results do not depend on `jobs`. Vocabularies are
/// built (and empty days rejected) before any sampling starts.
inline std::vector<DailyModel> run_daily(std::span<const DayDocuments> days,
                                         const DateWindow& window,
                                         const std::unordered_set<std::string>& stopwords,
                                         std::size_t min_count, const SamplerConfig& config,
                                         std::size_t jobs = 1) {
  config.validate();
  std::vector<EncodedCorpus> corpora;
  corpora.reserve(days.size());
  for (const auto& day : days) {
    if (!window.contains(day.day))
      throw Error(ErrorKind::Validation, format_day(day.day) + " is outside the window");
    if (day.docs.empty())
      throw Error(ErrorKind::EmptyDay, format_day(day.day) + " has no documents");
    try {
      corpora.push_back(build_vocab(day.docs, day.ids, stopwords, min_count));
    } catch (const Error& e) {
      throw Error(e.kind(), format_day(day.day) + ": " + e.what());
    }
  }

  std::vector<std::optional<TopicModel>> fitted(days.size());
  std::vector<std::exception_ptr> failures(days.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < days.size(); i = next++) {
      try {
        SamplerConfig c = config;
        c.seed = config.seed + std::uint32_t(window.index_of(days[i].day));
        fitted[i] = fit(corpora[i], c);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(days.size(), 1));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  std::vector<DailyModel> out;
  out.reserve(days.size());
  for (std::size_t i = 0; i < days.size(); ++i) {
    if (failures[i]) {
      try {
        std::rethrow_exception(failures[i]);
      } catch (const Error& e) {
        throw Error(e.kind(), format_day(days[i].day) + ": " + e.what());
      }
    }
    out.push_back({days[i].day, std::move(*fitted[i])});
  }
  return out;
}

struct CategoryEntry {
  Day day;
  TopicId topic;
  std::string category;
};

/// Human-edited (day, topic) -> category assignments.
class CategoryMap {
 public:
  void add(CategoryEntry entry) {
    if (entry.category.empty()) throw Error(ErrorKind::Validation, "empty category name");
    if (!keys_.insert({entry.day, entry.topic}).second)
      throw Error(ErrorKind::Validation, "topic " + std::to_string(entry.topic) + " of " +
                                             format_day(entry.day) + " is mapped twice");
    names_.insert(entry.category);
    entries_.push_back(std::move(entry));
  }

  const std::vector<CategoryEntry>& entries() const { return entries_; }
  /// Alphabetical.
  const std::set<std::string>& categories() const { return names_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<CategoryEntry> entries_;
  std::set<std::pair<Day, TopicId>> keys_;
  std::set<std::string> names_;
};

namespace detail {

// Splits one CSV line, honouring double-quoted fields.
inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back().push_back(c);
    }
  }
  if (quoted) throw Error(ErrorKind::Format, "unterminated quote");
  return fields;
}

inline std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

/// CSV with the header `date,topic_id,category`. Blank lines are skipped.
inline CategoryMap load_category_map(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  CategoryMap map;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty() || detail::trim(line) == "\r") continue;
    std::vector<std::string> f;
    try {
      f = detail::split_csv(line);
    } catch (const Error& e) {
      throw RecordError(ErrorKind::Format, line_no, e.what());
    }
    for (auto& s : f) s = detail::trim(s);
    if (!header) {
      if (f.size() != 3 || f[0] != "date" || f[1] != "topic_id" || f[2] != "category")
        throw RecordError(ErrorKind::Format, line_no,
                          "expected header 'date,topic_id,category'");
      header = true;
      continue;
    }
    if (f.size() != 3) throw RecordError(ErrorKind::Format, line_no, "expected 3 fields");
    auto day = parse_day(f[0]);
    if (!day) throw RecordError(ErrorKind::Format, line_no, "bad date '" + f[0] + "'");
    TopicId topic = 0;
    try {
      std::size_t used = 0;
      auto v = std::stoul(f[1], &used);
      if (used != f[1].size() || f[1].empty() || f[1][0] == '-') throw std::invalid_argument("");
      topic = TopicId(v);
    } catch (const std::logic_error&) {
      throw RecordError(ErrorKind::Format, line_no, "bad topic id '" + f[1] + "'");
    }
    try {
      map.add({*day, topic, f[2]});
    } catch (const Error& e) {
      throw RecordError(e.kind(), line_no, e.what());
    }
  }
  if (!header) throw Error(ErrorKind::Format, "category map has no header row");
  return map;
}

/// The topics a day's model produced.
struct DayTopics {
  Day day;
  std::size_t topics;
};

struct CategorizedTopic {
  Day day;
  TopicId topic;
  std::optional<std::string> category;
};

/// Labels every topic of every day; topics without an entry stay
/// uncategorized. Entries pointing at a missing day or topic are errors.
inline std::vector<CategorizedTopic> apply_category_map(std::span<const DayTopics> days,
                                                        const CategoryMap& map) {
  std::map<Day, std::size_t> day_index;
  for (std::size_t i = 0; i < days.size(); ++i) day_index[days[i].day] = i;
  std::vector<std::size_t> offsets{0};
  for (const auto& d : days) offsets.push_back(offsets.back() + d.topics);

  std::vector<CategorizedTopic> out;
  out.reserve(offsets.back());
  for (const auto& d : days)
    for (std::size_t k = 0; k < d.topics; ++k) out.push_back({d.day, TopicId(k), std::nullopt});

  for (const auto& e : map.entries()) {
    auto it = day_index.find(e.day);
    if (it == day_index.end())
      throw Error(ErrorKind::DanglingEntry, format_day(e.day) + "," + std::to_string(e.topic) +
                                                "," + e.category + ": no model for that day");
    if (e.topic >= days[it->second].topics)
      throw Error(ErrorKind::DanglingEntry,
                  format_day(e.day) + "," + std::to_string(e.topic) + "," + e.category +
                      ": the model has only " + std::to_string(days[it->second].topics) +
                      " topics");
    out[offsets[it->second] + e.topic].category = e.category;
  }
  return out;
}

inline constexpr const char* kUncategorized = "Uncategorized";

struct PresenceMatrix {
  std::vector<std::string> categories;
  std::vector<Day> days;
  std::vector<std::uint8_t> cells;  // categories x days

  bool at(std::size_t c, std::size_t d) const { return cells[c * days.size() + d] != 0; }
  std::size_t true_cells() const {
    return std::size_t(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
  }
};

/// Category rows are the categories of `categorized` (plus "Uncategorized"
/// when requested) in alphabetical order; columns are the window's days.
inline PresenceMatrix presence_matrix(std::span<const CategorizedTopic> categorized,
                                      const DateWindow& window,
                                      bool include_uncategorized = false) {
  std::set<std::string> names;
  for (const auto& t : categorized) {
    if (t.category)
      names.insert(*t.category);
    else if (include_uncategorized)
      names.insert(kUncategorized);
  }
  PresenceMatrix m;
  m.categories.assign(names.begin(), names.end());
  for (std::size_t d = 0; d < window.day_count(); ++d) m.days.push_back(window.day(d));
  m.cells.assign(m.categories.size() * m.days.size(), 0);
  for (const auto& t : categorized) {
    if (!t.category && !include_uncategorized) continue;
    if (!window.contains(t.day))
      throw Error(ErrorKind::Validation, format_day(t.day) + " is outside the window");
    const std::string& name = t.category ? *t.category : std::string(kUncategorized);
    auto c = std::size_t(std::lower_bound(m.categories.begin(), m.categories.end(), name) -
                         m.categories.begin());
    m.cells[c * m.days.size() + window.index_of(t.day)] = 1;
  }
  return m;
}

struct CategoryFrequency {
  std::string category;
  std::size_t days_present;
  double percentage;  // unrounded
};

/// Each category's share of all true cells, in percent.
inline std::vector<CategoryFrequency> category_frequencies(const PresenceMatrix& m) {
  const std::size_t total = m.true_cells();
  if (total == 0) throw Error(ErrorKind::NoData, "no categorized topics in the presence matrix");
  std::vector<CategoryFrequency> out;
  for (std::size_t c = 0; c < m.categories.size(); ++c) {
    std::size_t row = 0;
    for (std::size_t d = 0; d < m.days.size(); ++d) row += m.at(c, d) ? 1 : 0;
    out.push_back({m.categories[c], row, 100.0 * double(row) / double(total)});
  }
  return out;
}

/// Distinct categories per day.
inline std::vector<std::size_t> diversity_per_day(const PresenceMatrix& m) {
  std::vector<std::size_t> out(m.days.size(), 0);
  for (std::size_t c = 0; c < m.categories.size(); ++c)
    for (std::size_t d = 0; d < m.days.size(); ++d) out[d] += m.at(c, d) ? 1 : 0;
  return out;
}

inline void write_presence_csv(std::ostream& out, const PresenceMatrix& m) {
  out << "category";
  for (auto d : m.days) out << ',' << format_day(d);
  out << '\n';
  for (std::size_t c = 0; c < m.categories.size(); ++c) {
    out << detail::csv_field(m.categories[c]);
    for (std::size_t d = 0; d < m.days.size(); ++d) out << ',' << (m.at(c, d) ? 1 : 0);
    out << '\n';
  }
}

inline void write_frequencies_csv(std::ostream& out, std::span<const CategoryFrequency> freqs) {
  out << "category,percentage\n";
  for (const auto& f : freqs)
    out << detail::csv_field(f.category) << ',' << format_percent(f.percentage) << '\n';
}

inline void write_diversity_csv(std::ostream& out, std::span<const Day> days,
                                std::span<const std::size_t> counts) {
  out << "date,count\n";
  for (std::size_t i = 0; i < days.size(); ++i) out << format_day(days[i]) << ',' << counts[i] << '\n';
}

/// Horizontal bar chart, one row per day, `width` columns for the maximum.
inline void render_diversity_chart(std::ostream& out, std::span<const Day> days,
                                   std::span<const std::size_t> counts, std::size_t width = 40) {
  std::size_t peak = 0;
  for (auto c : counts) peak = std::max(peak, c);
  out << "Distinct negative-topic categories per day (UTC dates)\n";
  for (std::size_t i = 0; i < days.size(); ++i) {
    std::size_t bar = peak == 0 ? 0 : (counts[i] * width + peak / 2) / peak;
    out << format_day(days[i]) << " |" << std::string(bar, '#') << std::string(width - bar, ' ')
        << "| " << counts[i] << '\n';
  }
}

}  // namespace twisa
