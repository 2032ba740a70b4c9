// twisa: command-line driver for the ingest / sentiment / topics / report
// stages. Exit codes: 0 ok, 1 internal error, 2 validation or usage error,
// 3 empty result.

#include <exception>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "twisa/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::map<std::string, std::string> values;
  bool strict = false;
  bool include_uncategorized = false;
};

void add_value(CLI::App& app, Overrides& o, const std::string& flag, const std::string& key,
               const std::string& help) {
  app.add_option_function<std::string>(
         flag, [&o, key](const std::string& v) { o.values[key] = v; }, help)
      ->type_name("VALUE");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TwiSA: tweet sentiment and per-day topic reports"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  Overrides o;
  app.add_option("--config", o.config, "key = value configuration file");
  add_value(app, o, "--input", "input", "newline-delimited tweet records");
  add_value(app, o, "--query", "query", "query term file");
  add_value(app, o, "--lexicon", "lexicon", "sentiment lexicon file");
  add_value(app, o, "--stopwords", "stopwords", "stopword file");
  add_value(app, o, "--category-map", "category_map", "date,topic_id,category CSV");
  add_value(app, o, "--output", "output", "output directory");
  add_value(app, o, "--start", "start", "first day (YYYY-MM-DD)");
  add_value(app, o, "--end", "end", "last day (YYYY-MM-DD)");
  add_value(app, o, "--k", "k", "topics per daily model");
  add_value(app, o, "--alpha", "alpha", "document-topic prior per topic (default 5/k)");
  add_value(app, o, "--beta", "beta", "topic-word prior");
  add_value(app, o, "--iterations", "iterations", "Gibbs sweeps");
  add_value(app, o, "--seed", "seed", "random seed");
  add_value(app, o, "--min-count", "min_count", "minimum corpus frequency per term");
  add_value(app, o, "--jobs", "jobs", "parallel daily fits");
  app.add_flag("--strict", o.strict, "abort on the first malformed record");
  app.add_flag("--include-uncategorized", o.include_uncategorized,
               "report uncategorized topics as their own row");

  auto* ingest = app.add_subcommand("ingest", "filter and bucket raw tweets by day");
  auto* sentiment = app.add_subcommand("sentiment", "label tweets and split by polarity");
  auto* topics = app.add_subcommand("topics", "fit one topic model per day on negative tweets");
  auto* report = app.add_subcommand("report", "presence, frequency and diversity reports");
  auto* pipeline = app.add_subcommand("pipeline", "run all four stages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return twisa::kExitValidation;
  }

  try {
    twisa::PipelineConfig config;
    if (!o.config.empty()) config = twisa::load_config_file(o.config);
    if (o.strict) o.values["strict"] = "true";
    if (o.include_uncategorized) o.values["include_uncategorized"] = "true";
    config = twisa::apply_settings(config, o.values);

    if (ingest->parsed()) twisa::cmd_ingest(config, std::cerr);
    else if (sentiment->parsed()) twisa::cmd_sentiment(config, std::cerr);
    else if (topics->parsed()) twisa::cmd_topics(config, std::cerr);
    else if (report->parsed()) twisa::cmd_report(config, std::cout);
    else if (pipeline->parsed()) twisa::cmd_pipeline(config, std::cerr);
  } catch (const twisa::Error& e) {
    std::cerr << "twisa: " << e.what() << '\n';
    return twisa::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "twisa: internal error: " << e.what() << '\n';
    return twisa::kExitInternal;
  }
  return twisa::kExitOk;
}
