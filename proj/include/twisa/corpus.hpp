#pragma once

// Tweet records: parsing, query filtering, text normalisation and
// partitioning into calendar-day buckets (UTC).

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "twisa/dates.hpp"
#include "twisa/error.hpp"

namespace twisa {

struct Tweet {
  std::string id;
  Timestamp created_at{};
  std::string text;
  std::vector<std::string> tokens;
};

namespace detail {

inline bool is_ascii_alnum(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

inline bool is_mention_char(unsigned char c) { return is_ascii_alnum(c) || c == '_'; }

enum class CharClass { Word, Apostrophe, Separator };

// Classifies the character starting at `pos` and reports its byte width.
// Non-ASCII bytes are word characters, apart from the typographic quotes,
// dashes and ellipsis that tweets use as punctuation.
inline CharClass classify_char(std::string_view s, std::size_t pos, std::size_t& width) {
  auto c = static_cast<unsigned char>(s[pos]);
  width = 1;
  if (c < 0x80) {
    if (is_ascii_alnum(c)) return CharClass::Word;
    return c == '\'' ? CharClass::Apostrophe : CharClass::Separator;
  }
  if (c == 0xE2 && pos + 2 < s.size() && static_cast<unsigned char>(s[pos + 1]) == 0x80) {
    switch (static_cast<unsigned char>(s[pos + 2])) {
      case 0x98:  // ‘
      case 0x99:  // ’
        width = 3;
        return CharClass::Apostrophe;
      case 0x93:  // –
      case 0x94:  // —
      case 0x9C:  // “
      case 0x9D:  // ”
      case 0xA6:  // …
        width = 3;
        return CharClass::Separator;
      default:
        break;
    }
  }
  return CharClass::Word;
}

inline bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  return true;
}

inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline void emit_token(std::string& token, std::vector<std::string>& out) {
  if (!token.empty() && token != "rt" && token.rfind("http", 0) != 0) out.push_back(token);
  token.clear();
}

}  // namespace detail

/// Case-folds (ASCII), drops URLs, @-mentions and the token "rt", strips
/// the '#' marker from hashtags and splits on punctuation. Apostrophes
/// inside words are deleted ("they'll" -> "theyll").
inline std::vector<std::string> normalize(std::string_view text) {
  std::vector<std::string> out;
  std::string token;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && detail::is_space(static_cast<unsigned char>(text[pos]))) ++pos;
    std::size_t end = pos;
    while (end < text.size() && !detail::is_space(static_cast<unsigned char>(text[end]))) ++end;
    std::string_view chunk = text.substr(pos, end - pos);
    pos = end;
    if (chunk.empty()) continue;
    if (detail::starts_with_ci(chunk, "http://") || detail::starts_with_ci(chunk, "https://"))
      continue;

    std::size_t i = 0;
    while (i < chunk.size()) {
      auto c = static_cast<unsigned char>(chunk[i]);
      if (c == '@') {
        detail::emit_token(token, out);
        ++i;
        while (i < chunk.size() && detail::is_mention_char(static_cast<unsigned char>(chunk[i])))
          ++i;
        continue;
      }
      std::size_t width = 1;
      switch (detail::classify_char(chunk, i, width)) {
        case detail::CharClass::Word:
          if (width == 1)
            token.push_back(static_cast<char>(std::tolower(c)));
          else
            token.append(chunk.substr(i, width));
          break;
        case detail::CharClass::Apostrophe: {
          std::size_t next_width = 1;
          bool inside_word = !token.empty() && i + width < chunk.size() &&
                             chunk[i + width] != '@' &&
                             detail::classify_char(chunk, i + width, next_width) ==
                                 detail::CharClass::Word;
          if (!inside_word) detail::emit_token(token, out);
          break;
        }
        case detail::CharClass::Separator:
          detail::emit_token(token, out);
          break;
      }
      i += width;
    }
    detail::emit_token(token, out);
  }
  return out;
}

/// Boolean OR query over hashtags and bare words. Both kinds match whole
/// normalized tokens; a hashtag term matches with or without its '#'.
class Query {
 public:
  explicit Query(const std::vector<std::string>& terms) {
    for (const auto& raw : terms) {
      std::string term = raw;
      std::transform(term.begin(), term.end(), term.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (term.empty() || term == "#")
        throw Error(ErrorKind::Validation, "empty query term");
      std::string_view body = term;
      if (body.front() == '#') body.remove_prefix(1);
      auto key = normalize(body);
      if (key.size() != 1 || key.front() != body)
        throw Error(ErrorKind::Validation, "query term '" + raw + "' is not a single word");
      terms_.insert(term);
      keys_.insert(key.front());
    }
    if (terms_.empty()) throw Error(ErrorKind::Validation, "query has no terms");
  }

  const std::set<std::string>& terms() const { return terms_; }

  bool matches(std::span<const std::string> tokens) const {
    return std::any_of(tokens.begin(), tokens.end(),
                       [&](const std::string& t) { return keys_.count(t) != 0; });
  }

 private:
  std::set<std::string> terms_;
  std::unordered_set<std::string> keys_;
};

inline bool matches_query(std::span<const std::string> tokens, const Query& query) {
  return query.matches(tokens);
}

/// Matches on the tweet's tokens, normalizing the raw text when they are unset.
inline bool matches_query(const Tweet& tweet, const Query& query) {
  if (!tweet.tokens.empty()) return query.matches(tweet.tokens);
  auto tokens = normalize(tweet.text);
  return query.matches(tokens);
}

/// One term per line; blank lines are skipped and a leading '#' marks a
/// hashtag term (there are no comment lines).
inline Query load_query(std::istream& in) {
  std::vector<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    terms.push_back(line.substr(first, last - first + 1));
  }
  return Query(terms);
}

/// Parses one JSON-lines record with fields id, created_at and text.
/// `line_no` is only used for error context.
inline Tweet parse_record(std::string_view line, std::size_t line_no = 0) {
  auto blank = line.find_first_not_of(" \t\r");
  if (blank == std::string_view::npos)
    throw RecordError(ErrorKind::Malformed, line_no, "empty record");
  auto doc = nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw RecordError(ErrorKind::Malformed, line_no, "record is not a JSON object");

  Tweet tweet;
  auto id = doc.find("id");
  if (id == doc.end() || id->is_null())
    throw RecordError(ErrorKind::MissingField, line_no, "missing id");
  if (id->is_string())
    tweet.id = id->get<std::string>();
  else if (id->is_number_integer())
    tweet.id = id->dump();
  else
    throw RecordError(ErrorKind::Malformed, line_no, "id must be a string or integer");
  if (tweet.id.empty()) throw RecordError(ErrorKind::Malformed, line_no, "empty id");

  auto created = doc.find("created_at");
  if (created == doc.end() || created->is_null())
    throw RecordError(ErrorKind::MissingField, line_no, "missing created_at");
  if (!created->is_string())
    throw RecordError(ErrorKind::Timestamp, line_no, "created_at must be a string");
  auto ts = parse_timestamp(created->get<std::string>());
  if (!ts)
    throw RecordError(ErrorKind::Timestamp, line_no,
                      "unparseable created_at '" + created->get<std::string>() + "'");
  tweet.created_at = *ts;

  auto text = doc.find("text");
  if (text == doc.end() || text->is_null())
    throw RecordError(ErrorKind::MissingField, line_no, "missing text");
  if (!text->is_string()) throw RecordError(ErrorKind::Malformed, line_no, "text must be a string");
  tweet.text = text->get<std::string>();

  auto tokens = doc.find("tokens");
  if (tokens != doc.end() && tokens->is_array()) {
    for (const auto& t : *tokens) {
      if (!t.is_string()) throw RecordError(ErrorKind::Malformed, line_no, "non-string token");
      tweet.tokens.push_back(t.get<std::string>());
    }
  }
  return tweet;
}

/// Serialises a tweet (with tokens) as a single JSON line without the newline.
inline std::string to_record(const Tweet& tweet) {
  nlohmann::ordered_json doc;
  doc["id"] = tweet.id;
  doc["created_at"] = format_timestamp(tweet.created_at);
  doc["text"] = tweet.text;
  doc["tokens"] = tweet.tokens;
  return doc.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

struct ReadResult {
  std::vector<Tweet> tweets;
  std::size_t lines = 0;
  std::size_t malformed = 0;
  std::vector<std::string> errors;  // first few messages, for diagnostics
};

/// Reads every record from `in`. In strict mode the first bad record
/// (including a repeated id) throws; otherwise it is skipped and counted.
/// Blank lines are ignored in lenient mode.
inline ReadResult read_records(std::istream& in, bool strict) {
  constexpr std::size_t kMaxKeptErrors = 20;
  ReadResult result;
  std::unordered_set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    ++result.lines;
    if (!strict && line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Tweet t = parse_record(line, result.lines);
      if (!seen.insert(t.id).second)
        throw RecordError(ErrorKind::Malformed, result.lines, "duplicate id '" + t.id + "'");
      result.tweets.push_back(std::move(t));
    } catch (const RecordError& e) {
      if (strict) throw;
      ++result.malformed;
      if (result.errors.size() < kMaxKeptErrors) result.errors.emplace_back(e.what());
    }
  }
  return result;
}

struct DailyBuckets {
  DateWindow window;
  std::vector<std::vector<Tweet>> buckets;
  std::size_t excluded = 0;

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& b : buckets) n += b.size();
    return n;
  }
};

/// Assigns each tweet to the bucket of its UTC calendar day; tweets outside
/// the window are counted in `excluded`. Input order is kept within a bucket.
inline DailyBuckets partition_by_day(std::vector<Tweet> tweets, const DateWindow& window) {
  DailyBuckets out{window, std::vector<std::vector<Tweet>>(window.day_count()), 0};
  for (auto& t : tweets) {
    Day d = day_of(t.created_at);
    if (!window.contains(d)) {
      ++out.excluded;
      continue;
    }
    out.buckets[window.index_of(d)].push_back(std::move(t));
  }
  return out;
}

/// Bucket merge for sharded ingestion; both sides must share a window.
inline DailyBuckets merge(DailyBuckets a, DailyBuckets b) {
  if (a.window.start() != b.window.start() || a.window.end() != b.window.end())
    throw Error(ErrorKind::Validation, "cannot merge buckets over different windows");
  for (std::size_t i = 0; i < a.buckets.size(); ++i)
    for (auto& t : b.buckets[i]) a.buckets[i].push_back(std::move(t));
  a.excluded += b.excluded;
  return a;
}

}  // namespace twisa
