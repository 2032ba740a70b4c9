#include <cstdlib>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "test_support.hpp"
#include "twisa/pipeline.hpp"

namespace twisa {
namespace {

namespace fs = std::filesystem;
using testing::day;
using testing::read_text;
using testing::TempDir;
using testing::write_text;

const fs::path kSource = TWISA_SOURCE_DIR;

std::string record(const std::string& id, const std::string& ts, const std::string& text) {
  return nlohmann::json{{"id", id}, {"created_at", ts}, {"text", text}}.dump() + "\n";
}

// A small scratch workspace: query, lexicon, stopwords and an input whose
// tweets spread over a three-day window.
struct Workspace {
  TempDir dir;
  PipelineConfig config;

  Workspace() {
    write_text(dir / "query.txt", "#scflood\nflood\n");
    write_text(dir / "lexicon.txt", "[positive]\nsafe*\nthank*\n[negative]\ndamag*\ndead\nsad*\n");
    write_text(dir / "stopwords.txt", "the\nin\nat\n");
    config.input = dir / "tweets.jsonl";
    config.query = dir / "query.txt";
    config.lexicon = dir / "lexicon.txt";
    config.stopwords = dir / "stopwords.txt";
    config.category_map = dir / "map.csv";
    config.output = dir / "out";
    config.start = day("2015-10-03");
    config.end = day("2015-10-05");
    config.topics = 3;
    config.iterations = 20;
    config.seed = 7;
  }

  // Per day: `neg` negative, `pos` positive and `neu` neutral flood tweets.
  void write_corpus(int neg, int pos, int neu, int days = 3) {
    std::string s;
    int id = 0;
    const char* words[] = {"water", "road", "bridge", "roof", "power", "shelter"};
    for (int d = 0; d < days; ++d) {
      std::string ts = "2015-10-0" + std::to_string(3 + d) + "T1" + std::to_string(d) + ":00:00Z";
      auto add = [&](const std::string& extra) {
        std::string text = std::string(words[id % 6]) + " " + words[(id + d) % 6] + " in " +
                           extra + " #SCFlood";
        s += record(std::to_string(++id), ts, text);
      };
      for (int i = 0; i < neg; ++i) add("damage");
      for (int i = 0; i < pos; ++i) add("safe");
      for (int i = 0; i < neu; ++i) add("columbia");
    }
    s += record("999", "2015-10-04T10:00:00Z", "sunny afternoon");
    write_text(config.input, s);
  }

  fs::path out(const std::string& rel) const { return config.output / rel; }
};

ErrorKind failure_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error";
  return ErrorKind::Io;
}

std::vector<std::string> tree(const fs::path& root) {
  std::vector<std::string> files;
  if (!fs::exists(root)) return files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root).string());
  std::sort(files.begin(), files.end());
  return files;
}

TEST(Config, KeyValuesAndPathResolution) {
  std::istringstream in("# comment\ninput = tweets.jsonl\n k=7 \nalpha = 0.5\nstrict = yes\n\nseed=3\n");
  auto kv = read_key_values(in);
  auto c = apply_settings(PipelineConfig{}, kv, "/data/run");
  EXPECT_EQ(c.input, fs::path("/data/run/tweets.jsonl"));
  EXPECT_EQ(c.topics, 7u);
  EXPECT_DOUBLE_EQ(c.sampler().alpha, 0.5);
  EXPECT_TRUE(c.strict);
  EXPECT_EQ(c.sampler().seed, 3u);
  auto d = apply_settings(PipelineConfig{}, {{"k", "10"}});
  EXPECT_DOUBLE_EQ(d.sampler().alpha, 0.5);
  EXPECT_EQ(d.sampler().iterations, 1000u);
  EXPECT_DOUBLE_EQ(PipelineConfig{}.sampler().alpha, 0.2);
}

TEST(Config, LaterSettingsWin) {
  auto c = apply_settings(PipelineConfig{}, {{"k", "10"}, {"seed", "1"}});
  c = apply_settings(c, {{"seed", "9"}});
  EXPECT_EQ(c.topics, 10u);
  EXPECT_EQ(c.seed, 9u);
}

TEST(Config, RejectsBadValues) {
  for (KeyValues kv : std::vector<KeyValues>{{{"colour", "red"}},
                                             {{"k", "0"}},
                                             {{"k", "-3"}},
                                             {{"alpha", "0"}},
                                             {{"beta", "abc"}},
                                             {{"start", "2015-13-01"}},
                                             {{"strict", "maybe"}},
                                             {{"jobs", "0"}}})
    EXPECT_EQ(failure_kind([&] { apply_settings(PipelineConfig{}, kv); }), ErrorKind::Validation)
        << kv.begin()->first;
  std::istringstream bad("input tweets.jsonl\n");
  EXPECT_THROW(read_key_values(bad), RecordError);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(ErrorKind::Validation), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::EmptyPolarity), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::DanglingEntry), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::NoData), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::EmptyDay), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::EmptyCorpus), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::Io), 1);
}

TEST(Ingest, BundledSampleMatchesGeneratorCounts) {
  TempDir dir;
  auto c = load_config_file(kSource / "data/sample/twisa.conf");
  c.output = dir.path();
  std::ostringstream log;
  auto s = cmd_ingest(c, log);
  auto expected = nlohmann::json::parse(read_text(kSource / "data/sample/expected.json"));
  EXPECT_EQ(s.total, expected["lines"].get<std::size_t>());
  EXPECT_EQ(s.malformed, expected["malformed"].get<std::size_t>());
  EXPECT_EQ(s.matched, expected["matched"].get<std::size_t>());
  EXPECT_EQ(s.excluded, expected["excluded"].get<std::size_t>());
  auto files = tree(dir / "ingest");
  EXPECT_EQ(files.size(), 14u);
  EXPECT_EQ(files.front(), "day_2015-10-03.jsonl");
  EXPECT_EQ(files[12], "day_2015-10-15.jsonl");
  std::size_t lines = 0;
  for (std::size_t d = 0; d < 13; ++d) {
    auto text = read_text(dir / "ingest" / files[d]);
    auto n = std::size_t(std::count(text.begin(), text.end(), '\n'));
    EXPECT_EQ(n, s.per_day[d]);
    lines += n;
  }
  EXPECT_EQ(lines, s.matched - s.excluded);
  auto summary = nlohmann::json::parse(read_text(dir / "ingest/summary.json"));
  EXPECT_EQ(summary["in_window"].get<std::size_t>(), lines);
}

TEST(Ingest, StrictModeStopsAtMalformedLine) {
  Workspace w;
  w.write_corpus(1, 0, 0);
  write_text(w.config.input, read_text(w.config.input) + "{broken\n");
  w.config.strict = true;
  std::ostringstream log;
  EXPECT_EQ(failure_kind([&] { cmd_ingest(w.config, log); }), ErrorKind::Malformed);
  EXPECT_TRUE(tree(w.config.output).empty());
}

TEST(Ingest, FailuresLeaveNoOutput) {
  Workspace w;
  w.write_corpus(2, 1, 1);
  std::ostringstream log;
  auto c = w.config;
  c.query = w.dir / "missing.txt";
  EXPECT_EQ(exit_code_for(failure_kind([&] { cmd_ingest(c, log); })), 2);
  c = w.config;
  c.start.reset();
  EXPECT_EQ(exit_code_for(failure_kind([&] { cmd_ingest(c, log); })), 2);
  write_text(w.config.input, record("1", "2015-10-04T10:00:00Z", "sunny afternoon"));
  EXPECT_EQ(exit_code_for(failure_kind([&] { cmd_ingest(w.config, log); })), 3);
  EXPECT_TRUE(tree(w.config.output).empty());
}

TEST(Sentiment, PlantedTotals) {
  Workspace w;
  w.config.start = w.config.end = day("2015-10-03");
  w.write_corpus(10, 5, 5, 1);
  std::ostringstream log;
  cmd_ingest(w.config, log);
  auto s = cmd_sentiment(w.config, log);
  EXPECT_EQ(s.total(SentimentLabel::Negative), 10u);
  EXPECT_EQ(s.total(SentimentLabel::Positive), 5u);
  EXPECT_EQ(s.total(SentimentLabel::Neutral), 5u);
  auto summary = nlohmann::json::parse(read_text(w.out("sentiment/summary.json")));
  EXPECT_EQ(summary["percentages"]["negative"], "50.00");
  EXPECT_EQ(summary["percentages"]["neutral"], "25.00");
  EXPECT_EQ(read_text(w.out("sentiment/negative_per_day.csv")), "date,count\n2015-10-03,10\n");
  auto neg = read_text(w.out("sentiment/negative/day_2015-10-03.jsonl"));
  EXPECT_EQ(std::count(neg.begin(), neg.end(), '\n'), 10);
}

TEST(Sentiment, EmptyLexiconSectionIsValidationError) {
  Workspace w;
  w.write_corpus(1, 1, 1);
  std::ostringstream log;
  cmd_ingest(w.config, log);
  write_text(w.config.lexicon, "[positive]\nsafe\n[negative]\n");
  EXPECT_EQ(exit_code_for(failure_kind([&] { cmd_sentiment(w.config, log); })), 2);
  EXPECT_FALSE(fs::exists(w.out("sentiment")));
  w.config.lexicon = w.dir / "nope.txt";
  EXPECT_EQ(exit_code_for(failure_kind([&] { cmd_sentiment(w.config, log); })), 2);
}

TEST(Sentiment, AllNeutralWarns) {
  Workspace w;
  w.write_corpus(0, 0, 4);
  std::ostringstream log;
  cmd_ingest(w.config, log);
  auto s = cmd_sentiment(w.config, log);
  EXPECT_EQ(s.total(SentimentLabel::Neutral), 12u);
  EXPECT_NE(log.str().find("warning: no negative tweets"), std::string::npos);
  EXPECT_EQ(read_text(w.out("sentiment/negative/day_2015-10-04.jsonl")), "");
}

TEST(Topics, SmokeRunAndDeterminism) {
  Workspace w;
  w.write_corpus(6, 2, 2);
  std::ostringstream log;
  cmd_ingest(w.config, log);
  cmd_sentiment(w.config, log);
  auto models = cmd_topics(w.config, log);
  ASSERT_EQ(models.size(), 3u);
  for (const auto& m : models) EXPECT_EQ(m.model.topic_count(), 3u);
  auto first = read_text(w.out("topics/model_2015-10-04.txt"));
  cmd_topics(w.config, log);
  EXPECT_EQ(read_text(w.out("topics/model_2015-10-04.txt")), first);
  EXPECT_NE(read_text(w.out("topics/topics_2015-10-05.txt")).find("Topic 2"), std::string::npos);

  auto other = w.config;
  other.seed = 8;
  other.output = w.dir / "other";
  cmd_ingest(other, log);
  cmd_sentiment(other, log);
  cmd_topics(other, log);
  EXPECT_NE(read_text(other.output / "topics/model_2015-10-04.txt"), first);
}

TEST(Topics, EmptyDayNamesTheDay) {
  Workspace w;
  w.write_corpus(3, 1, 0, 2);
  w.config.jobs = 2;
  std::ostringstream log;
  cmd_ingest(w.config, log);
  cmd_sentiment(w.config, log);
  try {
    cmd_topics(w.config, log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(exit_code_for(e.kind()), 3);
    EXPECT_NE(std::string(e.what()).find("2015-10-05"), std::string::npos);
  }
  EXPECT_FALSE(fs::exists(w.out("topics")));
}

// Fits eight-topic models on thirteen days so the published category table
// can be used as the map.
struct FloodRun : Workspace {
  FloodRun() {
    config.start = day("2015-10-03");
    config.end = day("2015-10-15");
    config.topics = 8;
    config.iterations = 5;
    std::string s;
    for (int d = 0; d < 13; ++d) {
      auto date = format_day(testing::flood_window().day(std::size_t(d)));
      for (int i = 0; i < 4; ++i)
        s += record(std::to_string(d * 10 + i), date + "T12:00:00Z",
                    "damage to road bridge water roof power shelter #scflood");
    }
    write_text(config.input, s);
    std::ostringstream log;
    cmd_ingest(config, log);
    cmd_sentiment(config, log);
    cmd_topics(config, log);
  }
};

TEST(Report, CategoryTableThroughStages) {
  FloodRun run;
  write_text(run.config.category_map, testing::category_table_csv());
  std::ostringstream log;
  auto r = cmd_report(run.config, log);
  EXPECT_EQ(r.diversity, (std::vector<std::size_t>{3, 5, 7, 8, 8, 8, 7, 5, 3, 3, 3, 3, 2}));
  EXPECT_NE(read_text(run.out("report/frequencies.csv")).find("Victims,18.46\n"), std::string::npos);
  EXPECT_EQ(read_text(run.out("report/diversity.csv")).substr(0, 24), "date,count\n2015-10-03,3\n");
  EXPECT_EQ(read_text(run.out("report/presence.csv")).find("category,2015-10-03"), 0u);
  EXPECT_EQ(read_text(run.out("report/diversity_chart.txt")), log.str());
}

TEST(Report, MapErrors) {
  FloodRun run;
  std::ostringstream log;
  write_text(run.config.category_map, "date,topic_id,category\n2015-10-05,8,Road Damage\n");
  try {
    cmd_report(run.config, log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(exit_code_for(e.kind()), 2);
    EXPECT_NE(std::string(e.what()).find("2015-10-05,8,Road Damage"), std::string::npos);
  }
  write_text(run.config.category_map, "date,topic_id,category\n");
  EXPECT_EQ(exit_code_for(failure_kind([&] { cmd_report(run.config, log); })), 3);
  EXPECT_FALSE(fs::exists(run.out("report")));

  run.config.include_uncategorized = true;
  auto r = cmd_report(run.config, log);
  ASSERT_EQ(r.frequencies.size(), 1u);
  EXPECT_EQ(r.frequencies[0].category, "Uncategorized");
  EXPECT_EQ(read_text(run.out("report/frequencies.csv")), "category,percentage\nUncategorized,100.00\n");
}

TEST(Pipeline, EqualsManualStages) {
  Workspace w;
  w.write_corpus(5, 2, 2);
  write_text(w.config.category_map, "date,topic_id,category\n2015-10-04,1,Road Damage\n");
  std::ostringstream log;
  cmd_pipeline(w.config, log);

  auto manual = w.config;
  manual.output = w.dir / "manual";
  cmd_ingest(manual, log);
  cmd_sentiment(manual, log);
  cmd_topics(manual, log);
  cmd_report(manual, log);

  auto files = tree(w.config.output);
  ASSERT_EQ(files, tree(manual.output));
  EXPECT_EQ(files.size(), 4u + (3u * 3u + 2u) + 6u + 4u);
  for (const auto& f : files)
    EXPECT_EQ(read_text(w.config.output / f), read_text(manual.output / f)) << f;
}

TEST(Pipeline, ValidatesEveryInputFirst) {
  Workspace w;
  w.write_corpus(5, 2, 2);
  std::ostringstream log;
  EXPECT_EQ(failure_kind([&] { cmd_pipeline(w.config, log); }), ErrorKind::Validation);
  EXPECT_FALSE(fs::exists(w.config.output));
}

int run_cli(const std::string& args, const fs::path& log) {
  std::string cmd = std::string("\"") + TWISA_CLI + "\" " + args + " >\"" + log.string() + "\" 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodesAndOverrides) {
  Workspace w;
  w.write_corpus(4, 1, 1);
  auto conf = w.dir / "run.conf";
  write_text(conf, "input = tweets.jsonl\nquery = query.txt\nlexicon = lexicon.txt\n"
                   "stopwords = stopwords.txt\ncategory_map = map.csv\noutput = out\n"
                   "start = 2015-10-03\nend = 2015-10-05\nk = 50\n");
  write_text(w.config.category_map, "date,topic_id,category\n2015-10-03,0,Victims\n");
  auto log = w.dir / "log.txt";
  const std::string base = "--config \"" + conf.string() + "\" ";

  EXPECT_EQ(run_cli("", log), 2);
  EXPECT_EQ(run_cli("frobnicate", log), 2);
  EXPECT_EQ(run_cli(base + "ingest --query \"" + (w.dir / "absent.txt").string() + "\"", log), 2);
  EXPECT_NE(read_text(log).find("absent.txt"), std::string::npos);
  EXPECT_EQ(run_cli(base + "ingest --start 2016-01-01 --end 2016-01-02", log), 3);
  EXPECT_EQ(run_cli(base + "ingest", log), 0);
  EXPECT_EQ(run_cli(base + "sentiment", log), 0);
  EXPECT_EQ(run_cli(base + "topics", log), 2);  // 50 topics exceed the tokens of a day
  EXPECT_EQ(run_cli(base + "topics --k 2 --iterations 10 --seed 4 --jobs 2", log), 0);
  EXPECT_EQ(run_cli(base + "report", log), 0);
  EXPECT_NE(read_text(log).find("2015-10-03 |"), std::string::npos);
  EXPECT_EQ(read_text(w.out("report/frequencies.csv")), "category,percentage\nVictims,100.00\n");
  auto dump = read_text(w.out("topics/model_2015-10-03.txt"));
  EXPECT_NE(dump.find("topics 2\n"), std::string::npos);
  EXPECT_NE(dump.find("iterations 10\n"), std::string::npos);
  EXPECT_NE(dump.find("seed 4\n"), std::string::npos);
  EXPECT_EQ(run_cli(base + "report --include-uncategorized", log), 0);
  EXPECT_NE(read_text(w.out("report/presence.csv")).find("\nUncategorized,"), std::string::npos);
}

}  // namespace
}  // namespace twisa
