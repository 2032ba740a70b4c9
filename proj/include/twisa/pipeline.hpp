#pragma once

// The four file-based pipeline stages and their shared configuration.
//
// Output layout under the configured output directory:
//   ingest/day_YYYY-MM-DD.jsonl, ingest/summary.json
//   sentiment/{negative,neutral,positive}/day_YYYY-MM-DD.jsonl,
//   sentiment/summary.json, sentiment/negative_per_day.csv
//   topics/model_YYYY-MM-DD.txt, topics/topics_YYYY-MM-DD.txt
//   report/presence.csv, report/frequencies.csv, report/diversity.csv,
//   report/diversity_chart.txt

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "twisa/corpus.hpp"
#include "twisa/dates.hpp"
#include "twisa/error.hpp"
#include "twisa/model_io.hpp"
#include "twisa/sentiment.hpp"
#include "twisa/temporal.hpp"
#include "twisa/topicmodel.hpp"

namespace twisa {

namespace fs = std::filesystem;

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitValidation = 2,
  kExitEmpty = 3,
};

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyCorpus:
    case ErrorKind::EmptyDay:
    case ErrorKind::NoData:
      return kExitEmpty;
    case ErrorKind::Io:
      return kExitInternal;
    default:
      return kExitValidation;
  }
}

struct PipelineConfig {
  fs::path input;
  fs::path query;
  fs::path lexicon;
  fs::path stopwords;
  fs::path category_map;
  fs::path output;
  std::optional<Day> start;
  std::optional<Day> end;
  std::size_t topics = 25;
  std::optional<double> alpha;  // defaults to 5 / topics
  double beta = 0.01;
  std::size_t iterations = 1000;
  std::uint32_t seed = 0;
  std::size_t min_count = 1;
  bool strict = false;
  std::size_t jobs = 1;
  bool include_uncategorized = false;

  SamplerConfig sampler() const {
    SamplerConfig c = SamplerConfig::with_topics(topics);
    if (alpha) c.alpha = *alpha;
    c.beta = beta;
    c.iterations = iterations;
    c.seed = seed;
    return c;
  }

  DateWindow window() const {
    if (!start || !end) throw Error(ErrorKind::Validation, "start and end dates are required");
    return DateWindow(*start, *end);
  }

  fs::path stage_dir(const char* stage) const { return output / stage; }
};

using KeyValues = std::map<std::string, std::string>;

namespace detail {

template <class T>
T parse_unsigned(const std::string& key, const std::string& v, T lo = 0) {
  try {
    std::size_t used = 0;
    if (v.empty() || v[0] == '-') throw std::invalid_argument(v);
    auto n = std::stoull(v, &used);
    if (used != v.size() || n < lo || n > std::numeric_limits<T>::max())
      throw std::out_of_range(v);
    return T(n);
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::Validation, "bad value for " + key + ": '" + v + "'");
  }
}

inline double parse_positive(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size() || !(d > 0) || !std::isfinite(d)) throw std::out_of_range(v);
    return d;
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::Validation, "bad value for " + key + ": '" + v + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(ErrorKind::Validation, "bad boolean for " + key + ": '" + v + "'");
}

}  // namespace detail

/// Reads `key = value` lines; '#' starts a comment line.
inline KeyValues read_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = detail::trim(line);
    if (!body.empty() && body.back() == '\r') body.pop_back();
    if (body.empty() || body[0] == '#') continue;
    auto eq = body.find('=');
    if (eq == std::string::npos)
      throw RecordError(ErrorKind::Validation, line_no, "expected key = value");
    kv[detail::trim(body.substr(0, eq))] = detail::trim(body.substr(eq + 1));
  }
  return kv;
}

/// Applies key/value settings on top of `base`. Relative paths are resolved
/// against `base_dir`.
inline PipelineConfig apply_settings(PipelineConfig base, const KeyValues& kv,
                                     const fs::path& base_dir = {}) {
  auto path = [&](const std::string& v) {
    fs::path p(v);
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  for (const auto& [key, value] : kv) {
    if (key == "input") base.input = path(value);
    else if (key == "query") base.query = path(value);
    else if (key == "lexicon") base.lexicon = path(value);
    else if (key == "stopwords") base.stopwords = path(value);
    else if (key == "category_map") base.category_map = path(value);
    else if (key == "output") base.output = path(value);
    else if (key == "start" || key == "end") {
      auto d = parse_day(value);
      if (!d) throw Error(ErrorKind::Validation, "bad date for " + key + ": '" + value + "'");
      (key == "start" ? base.start : base.end) = *d;
    } else if (key == "k" || key == "topics") base.topics = detail::parse_unsigned<std::size_t>(key, value, 1);
    else if (key == "alpha") base.alpha = detail::parse_positive(key, value);
    else if (key == "beta") base.beta = detail::parse_positive(key, value);
    else if (key == "iterations") base.iterations = detail::parse_unsigned<std::size_t>(key, value, 1);
    else if (key == "seed") base.seed = detail::parse_unsigned<std::uint32_t>(key, value);
    else if (key == "min_count") base.min_count = detail::parse_unsigned<std::size_t>(key, value, 1);
    else if (key == "strict") base.strict = detail::parse_bool(key, value);
    else if (key == "jobs") base.jobs = detail::parse_unsigned<std::size_t>(key, value, 1);
    else if (key == "include_uncategorized") base.include_uncategorized = detail::parse_bool(key, value);
    else throw Error(ErrorKind::Validation, "unknown configuration key '" + key + "'");
  }
  return base;
}

inline PipelineConfig load_config_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::Validation, "cannot open config file " + file.string());
  return apply_settings(PipelineConfig{}, read_key_values(in), file.parent_path());
}

namespace detail {

inline void require_file(const fs::path& p, const char* what) {
  if (p.empty()) throw Error(ErrorKind::Validation, std::string(what) + " is not configured");
  std::error_code ec;
  if (!fs::is_regular_file(p, ec))
    throw Error(ErrorKind::Validation, std::string(what) + " not found: " + p.string());
}

inline void require_output(const PipelineConfig& c) {
  if (c.output.empty()) throw Error(ErrorKind::Validation, "output directory is not configured");
}

inline std::ifstream open_input(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + p.string());
  return in;
}

inline void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
}

inline std::string day_file(Day d) { return "day_" + format_day(d) + ".jsonl"; }

inline std::vector<Tweet> read_day_file(const fs::path& p) {
  auto in = open_input(p);
  auto result = read_records(in, true);
  return std::move(result.tweets);
}

inline std::string join_records(const std::vector<Tweet>& tweets) {
  std::string s;
  for (const auto& t : tweets) {
    s += to_record(t);
    s += '\n';
  }
  return s;
}

}  // namespace detail

inline std::unordered_set<std::string> load_stopwords(std::istream& in) {
  std::unordered_set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto w = detail::trim(line);
    if (!w.empty() && w.back() == '\r') w.pop_back();
    if (w.empty()) continue;
    std::transform(w.begin(), w.end(), w.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    out.insert(w);
  }
  return out;
}

struct IngestSummary {
  std::size_t total = 0;  // records read (blank lines excluded)
  std::size_t malformed = 0;
  std::size_t matched = 0;
  std::size_t excluded = 0;  // matched but outside the window
  std::vector<std::size_t> per_day;
};

/// Parses, filters and buckets the input. Writes nothing if no tweet lands
/// in the window.
inline IngestSummary cmd_ingest(const PipelineConfig& c, std::ostream& log) {
  detail::require_file(c.input, "input");
  detail::require_file(c.query, "query file");
  detail::require_output(c);
  const DateWindow window = c.window();
  Query query = [&] {
    auto in = detail::open_input(c.query);
    return load_query(in);
  }();

  auto in = detail::open_input(c.input);
  ReadResult read = read_records(in, c.strict);
  for (const auto& e : read.errors) log << "warning: " << c.input.string() << ": " << e << '\n';

  IngestSummary s;
  s.malformed = read.malformed;
  s.total = read.tweets.size() + read.malformed;
  std::vector<Tweet> matched;
  for (auto& t : read.tweets) {
    t.tokens = normalize(t.text);
    if (matches_query(std::span<const std::string>(t.tokens), query)) matched.push_back(std::move(t));
  }
  s.matched = matched.size();
  DailyBuckets buckets = partition_by_day(std::move(matched), window);
  s.excluded = buckets.excluded;
  for (const auto& b : buckets.buckets) s.per_day.push_back(b.size());
  if (buckets.total() == 0)
    throw Error(ErrorKind::NoData, "no matching tweets inside the window");

  const fs::path dir = c.stage_dir("ingest");
  for (std::size_t d = 0; d < window.day_count(); ++d)
    detail::write_file(dir / detail::day_file(window.day(d)),
                       detail::join_records(buckets.buckets[d]));

  nlohmann::ordered_json j;
  j["window"] = {{"start", format_day(window.start())}, {"end", format_day(window.end())}};
  j["day_boundary"] = "UTC";
  j["total"] = s.total;
  j["matched"] = s.matched;
  j["excluded"] = s.excluded;
  j["malformed"] = s.malformed;
  j["in_window"] = buckets.total();
  auto& days = j["per_day"] = nlohmann::ordered_json::object();
  for (std::size_t d = 0; d < window.day_count(); ++d) days[format_day(window.day(d))] = s.per_day[d];
  detail::write_file(dir / "summary.json", j.dump(2) + "\n");
  log << "ingest: " << s.total << " records, " << s.malformed << " malformed, " << s.matched
      << " matched, " << s.excluded << " outside the window\n";
  return s;
}

/// Labels every ingested tweet and splits the buckets by polarity.
inline SentimentSummary cmd_sentiment(const PipelineConfig& c, std::ostream& log) {
  detail::require_file(c.lexicon, "lexicon");
  detail::require_output(c);
  const DateWindow window = c.window();
  const fs::path in_dir = c.stage_dir("ingest");
  for (std::size_t d = 0; d < window.day_count(); ++d)
    detail::require_file(in_dir / detail::day_file(window.day(d)), "ingest bucket");
  Lexicon lex = [&] {
    auto in = detail::open_input(c.lexicon);
    return load_lexicon(in);
  }();

  std::array<std::vector<std::string>, 3> split;  // per label, per day
  for (auto& v : split) v.resize(window.day_count());
  std::vector<DayLabel> labels;
  for (std::size_t d = 0; d < window.day_count(); ++d) {
    for (const auto& t : detail::read_day_file(in_dir / detail::day_file(window.day(d)))) {
      auto label = classify(score(t.tokens, lex));
      labels.push_back({day_of(t.created_at), label});
      auto& out = split[static_cast<std::size_t>(label)][d];
      out += to_record(t);
      out += '\n';
    }
  }
  SentimentSummary summary = summarize(labels, window);

  const fs::path dir = c.stage_dir("sentiment");
  for (auto label : kAllLabels)
    for (std::size_t d = 0; d < window.day_count(); ++d)
      detail::write_file(dir / to_string(label) / detail::day_file(window.day(d)),
                         split[static_cast<std::size_t>(label)][d]);

  nlohmann::ordered_json j;
  j["window"] = {{"start", format_day(window.start())}, {"end", format_day(window.end())}};
  j["day_boundary"] = "UTC";
  j["corpus_size"] = summary.corpus_size();
  for (auto label : kAllLabels)
    j["totals"][to_string(label)] = summary.total(label);
  for (auto label : kAllLabels)
    j["percentages"][to_string(label)] = format_percent(summary.percentage(label));
  j["negative_per_day"] = {{"min", summary.min_negative()},
                           {"max", summary.max_negative()},
                           {"mean", format_percent(summary.mean_negative())}};
  detail::write_file(dir / "summary.json", j.dump(2) + "\n");

  std::string csv = "date,count\n";
  for (std::size_t d = 0; d < window.day_count(); ++d)
    csv += format_day(window.day(d)) + "," + std::to_string(summary.negative_per_day[d]) + "\n";
  detail::write_file(dir / "negative_per_day.csv", csv);

  log << "sentiment: " << summary.total(SentimentLabel::Negative) << " negative, "
      << summary.total(SentimentLabel::Neutral) << " neutral, "
      << summary.total(SentimentLabel::Positive) << " positive\n";
  if (summary.total(SentimentLabel::Negative) == 0)
    log << "warning: no negative tweets; the topics stage will have nothing to model\n";
  return summary;
}

inline std::string model_file(Day d) { return "model_" + format_day(d) + ".txt"; }
inline std::string topics_file(Day d) { return "topics_" + format_day(d) + ".txt"; }

/// Fits one model per window day on the negative tweets.
inline std::vector<DailyModel> cmd_topics(const PipelineConfig& c, std::ostream& log) {
  detail::require_file(c.stopwords, "stopword file");
  detail::require_output(c);
  const DateWindow window = c.window();
  const SamplerConfig sampler = c.sampler();
  sampler.validate();
  if (c.jobs < 1) throw Error(ErrorKind::Validation, "jobs must be at least 1");
  const fs::path in_dir = c.stage_dir("sentiment") / "negative";
  for (std::size_t d = 0; d < window.day_count(); ++d)
    detail::require_file(in_dir / detail::day_file(window.day(d)), "negative bucket");
  auto stopwords = [&] {
    auto in = detail::open_input(c.stopwords);
    return load_stopwords(in);
  }();

  std::vector<DayDocuments> days;
  for (std::size_t d = 0; d < window.day_count(); ++d) {
    DayDocuments day{window.day(d), {}, {}};
    for (auto& t : detail::read_day_file(in_dir / detail::day_file(day.day))) {
      day.docs.push_back(std::move(t.tokens));
      day.ids.push_back(std::move(t.id));
    }
    days.push_back(std::move(day));
  }
  auto models = run_daily(days, window, stopwords, c.min_count, sampler, c.jobs);

  const fs::path dir = c.stage_dir("topics");
  for (const auto& dm : models) {
    std::ostringstream dump, listing;
    write_model_dump(dump, dm.model, format_day(dm.day));
    write_topic_listing(listing, dm.model, format_day(dm.day));
    detail::write_file(dir / model_file(dm.day), dump.str());
    detail::write_file(dir / topics_file(dm.day), listing.str());
  }
  log << "topics: " << models.size() << " models, " << models.size() * sampler.topics
      << " topics\n";
  return models;
}

struct Report {
  PresenceMatrix matrix;
  std::vector<CategoryFrequency> frequencies;
  std::vector<std::size_t> diversity;
};

/// Joins the category map with the fitted models and writes the three CSVs
/// and the diversity chart.
inline Report cmd_report(const PipelineConfig& c, std::ostream& log) {
  detail::require_file(c.category_map, "category map");
  detail::require_output(c);
  const DateWindow window = c.window();
  const fs::path in_dir = c.stage_dir("topics");
  for (std::size_t d = 0; d < window.day_count(); ++d)
    detail::require_file(in_dir / model_file(window.day(d)), "model dump");

  CategoryMap map = [&] {
    auto in = detail::open_input(c.category_map);
    return load_category_map(in);
  }();
  std::vector<DayTopics> days;
  for (std::size_t d = 0; d < window.day_count(); ++d) {
    auto in = detail::open_input(in_dir / model_file(window.day(d)));
    days.push_back({window.day(d), read_model_dump(in).model.topic_count()});
  }

  auto categorized = apply_category_map(days, map);
  Report r{presence_matrix(categorized, window, c.include_uncategorized), {}, {}};
  r.frequencies = category_frequencies(r.matrix);
  r.diversity = diversity_per_day(r.matrix);

  std::ostringstream presence, freqs, diversity, chart;
  write_presence_csv(presence, r.matrix);
  write_frequencies_csv(freqs, r.frequencies);
  write_diversity_csv(diversity, r.matrix.days, r.diversity);
  render_diversity_chart(chart, r.matrix.days, r.diversity);
  const fs::path dir = c.stage_dir("report");
  detail::write_file(dir / "presence.csv", presence.str());
  detail::write_file(dir / "frequencies.csv", freqs.str());
  detail::write_file(dir / "diversity.csv", diversity.str());
  detail::write_file(dir / "diversity_chart.txt", chart.str());
  log << chart.str();
  return r;
}

inline void cmd_pipeline(const PipelineConfig& c, std::ostream& log) {
  // Validate every stage's static inputs up front.
  detail::require_file(c.input, "input");
  detail::require_file(c.query, "query file");
  detail::require_file(c.lexicon, "lexicon");
  detail::require_file(c.stopwords, "stopword file");
  detail::require_file(c.category_map, "category map");
  detail::require_output(c);
  c.window();
  c.sampler().validate();

  cmd_ingest(c, log);
  cmd_sentiment(c, log);
  cmd_topics(c, log);
  cmd_report(c, log);
}

}  // namespace twisa
