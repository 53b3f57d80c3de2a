#include "ideabench/pipeline.hpp"

#include <algorithm>
#include <array>
#include <ctime>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "ideabench/digest.hpp"
#include "ideabench/embedder.hpp"
#include "ideabench/errors.hpp"
#include "ideabench/jsonl.hpp"
#include "ideabench/metrics.hpp"
#include "ideabench/report.hpp"
#include "ideabench/rng.hpp"
#include "ideabench/stats.hpp"
#include "ideabench/version.hpp"

#include <json.hpp>

namespace ideabench::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config key " + key + " wants a boolean, got: " + value);
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + " wants an integer, got: " + value);
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + " wants a number, got: " + value);
  }
}

std::vector<std::string> split_commas(const std::string& value) {
  std::vector<std::string> parts;
  std::stringstream ss(value);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::string t = trim(part);
    if (!t.empty()) parts.push_back(t);
  }
  return parts;
}

std::string utc_now_iso8601() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void apply_override(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "problems") {
    config.problems_path = value;
  } else if (key == "human_solutions") {
    config.human_solutions_path = value;
  } else if (key == "ratings") {
    config.ratings_path = value;
  } else if (key == "out") {
    config.out_dir = value;
  } else if (key == "seed") {
    try {
      std::size_t pos = 0;
      config.seed = std::stoull(value, &pos);
      if (pos != value.size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw ConfigError("config key seed wants an unsigned integer, got: " + value);
    }
  } else if (key == "problem_ids") {
    config.problem_ids.clear();
    for (const std::string& part : split_commas(value)) {
      config.problem_ids.push_back(static_cast<int>(parse_int(key, part)));
    }
  } else if (key == "base") {
    config.run_base = parse_bool(key, value);
  } else if (key == "adjectives") {
    config.adjectives.clear();
    for (const std::string& part : split_commas(value)) {
      try {
        config.adjectives.push_back(promptgen::adjective_from_string(part));
      } catch (const ValidationError& e) {
        throw ConfigError(std::string("config key adjectives: ") + e.what());
      }
    }
  } else if (key == "fewshot") {
    config.run_fewshot = parse_bool(key, value);
  } else if (key == "gen_mode") {
    config.gen_mode = value;
  } else if (key == "gen_fixtures") {
    config.gen_fixtures_path = value;
  } else if (key == "gen_url") {
    config.gen.endpoint_url = value;
  } else if (key == "gen_model") {
    config.gen.model_name = value;
  } else if (key == "gen_api_key_env") {
    config.gen.api_key_env = value;
  } else if (key == "gen_temperature") {
    config.gen.temperature = parse_real(key, value);
  } else if (key == "gen_top_p") {
    config.gen.top_p = parse_real(key, value);
  } else if (key == "gen_frequency_penalty") {
    config.gen.frequency_penalty = parse_real(key, value);
  } else if (key == "gen_presence_penalty") {
    config.gen.presence_penalty = parse_real(key, value);
  } else if (key == "gen_max_tokens") {
    config.gen.max_tokens = static_cast<int>(parse_int(key, value));
  } else if (key == "gen_timeout_ms") {
    config.gen.timeout_ms = static_cast<int>(parse_int(key, value));
  } else if (key == "gen_max_retries") {
    config.gen.max_retries = static_cast<int>(parse_int(key, value));
  } else if (key == "gen_backoff_ms") {
    config.gen.retry_backoff_ms = static_cast<int>(parse_int(key, value));
  } else if (key == "gen_concurrency") {
    config.gen.concurrency = static_cast<int>(parse_int(key, value));
  } else if (key == "provider") {
    config.provider = value;
  } else if (key == "embed_dim") {
    config.embed_dim = static_cast<int>(parse_int(key, value));
  } else if (key == "embed_file") {
    config.embed_file = value;
  } else if (key == "embed_url") {
    config.embed_url = value;
  } else if (key == "embed_timeout_ms") {
    config.embed_timeout_ms = static_cast<int>(parse_int(key, value));
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  RunConfig config;
  std::vector<std::string> problems;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      problems.push_back(path.string() + ":" + std::to_string(lineno) +
                         ": expected key = value, got: " + t);
      continue;
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    try {
      apply_override(config, key, value);
    } catch (const ConfigError& e) {
      problems.push_back(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "config errors:";
    for (const std::string& p : problems) msg += "\n  - " + p;
    throw ConfigError(msg);
  }
  return config;
}

void RunConfig::validate() const {
  std::vector<std::string> problems;
  auto require_file = [&](const std::string& label, const std::string& path) {
    if (path.empty()) {
      problems.push_back(label + " path is not set");
    } else if (!fs::exists(path)) {
      problems.push_back(label + " file not found: " + path);
    }
  };
  require_file("problems", problems_path);
  require_file("human_solutions", human_solutions_path);
  if (!ratings_path.empty() && !fs::exists(ratings_path)) {
    problems.push_back("ratings file not found: " + ratings_path);
  }
  if (out_dir.empty()) problems.push_back("out directory is not set");
  if (provider != "stub" && provider != "file" && provider != "http") {
    problems.push_back("provider must be stub, file, or http, got: " + provider);
  }
  if (provider == "file") {
    if (embed_file.empty()) {
      problems.push_back("provider=file needs embed_file");
    } else if (!fs::exists(embed_file)) {
      problems.push_back("embed_file not found: " + embed_file);
    }
  }
  if (provider == "http" && embed_url.empty()) {
    problems.push_back("provider=http needs embed_url");
  }
  if (embed_dim < 3) problems.push_back("embed_dim must be >= 3 (3-d novelty projection)");
  if (gen_mode != "http" && gen_mode != "fixtures") {
    problems.push_back("gen_mode must be http or fixtures, got: " + gen_mode);
  }
  if (gen_mode == "fixtures") {
    if (gen_fixtures_path.empty()) {
      problems.push_back("gen_mode=fixtures needs gen_fixtures");
    } else if (!fs::exists(gen_fixtures_path)) {
      problems.push_back("gen_fixtures file not found: " + gen_fixtures_path);
    }
  }
  try {
    gen.validate();
  } catch (const ValidationError& e) {
    problems.push_back(e.what());
  }
  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const std::string& p : problems) msg += "\n  - " + p;
    throw ConfigError(msg);
  }
}

namespace {

json config_to_json(const RunConfig& c) {
  json j;
  j["problems"] = c.problems_path;
  j["human_solutions"] = c.human_solutions_path;
  j["ratings"] = c.ratings_path;
  j["out"] = c.out_dir;
  j["seed"] = c.seed;
  j["problem_ids"] = c.problem_ids;
  j["base"] = c.run_base;
  json adjectives = json::array();
  for (promptgen::Adjective a : c.adjectives) adjectives.push_back(promptgen::to_string(a));
  j["adjectives"] = adjectives;
  j["fewshot"] = c.run_fewshot;
  j["gen_mode"] = c.gen_mode;
  j["gen_fixtures"] = c.gen_fixtures_path;
  j["gen_url"] = c.gen.endpoint_url;
  j["gen_model"] = c.gen.model_name;
  j["gen_api_key_env"] = c.gen.api_key_env;
  j["gen_temperature"] = c.gen.temperature;
  j["gen_top_p"] = c.gen.top_p;
  j["gen_frequency_penalty"] = c.gen.frequency_penalty;
  j["gen_presence_penalty"] = c.gen.presence_penalty;
  j["gen_max_tokens"] = c.gen.max_tokens;
  j["gen_timeout_ms"] = c.gen.timeout_ms;
  j["gen_max_retries"] = c.gen.max_retries;
  j["gen_backoff_ms"] = c.gen.retry_backoff_ms;
  j["gen_concurrency"] = c.gen.concurrency;
  j["provider"] = c.provider;
  j["embed_dim"] = c.embed_dim;
  j["embed_file"] = c.embed_file;
  j["embed_url"] = c.embed_url;
  j["embed_timeout_ms"] = c.embed_timeout_ms;
  return j;
}

class Manifest {
 public:
  explicit Manifest(const fs::path& out_dir) : path_(out_dir / "manifest.json") {
    if (fs::exists(path_)) {
      json parsed = json::parse(jsonl::read_file(path_), nullptr, false);
      if (parsed.is_discarded() || !parsed.is_object()) {
        throw ParseError(path_.string(), 1, "manifest is not a JSON object");
      }
      j_ = std::move(parsed);
    }
    if (!j_.contains("stages")) j_["stages"] = json::object();
    if (!j_.contains("input_digests")) j_["input_digests"] = json::object();
    if (!j_.contains("stage_timestamps")) j_["stage_timestamps"] = json::object();
  }

  void snapshot(const RunConfig& config) {
    j_["config"] = config_to_json(config);
    j_["tool_version"] = kVersion;
    j_["conventions"] = report::conventions_json();
  }

  void record_input(const std::string& path) {
    j_["input_digests"][path] = digest::sha256_file_hex(path);
  }

  // Replaces the stage entry wholesale; stages are idempotent per run.
  void set_stage(const std::string& name, json data) { j_["stages"][name] = std::move(data); }

  const json& stage(const std::string& name) const {
    static const json empty = json::object();
    auto it = j_["stages"].find(name);
    return it == j_["stages"].end() ? empty : *it;
  }

  void set_variance_explained(const std::map<std::string, double>& per_problem) {
    j_["variance_explained_3"] = per_problem;
  }

  void stamp(const std::string& stage) { j_["stage_timestamps"][stage] = utc_now_iso8601(); }

  void save() { jsonl::write_file(path_, j_.dump(2) + "\n"); }

 private:
  fs::path path_;
  json j_ = json::object();
};

// On failure, drags everything the stage wrote so far under failed/<stage>/.
struct StageFiles {
  fs::path out_dir;
  std::string stage;
  std::vector<fs::path> written;

  void wrote(const fs::path& p) { written.push_back(p); }

  void quarantine() const {
    fs::path fail_dir = out_dir / "failed" / stage;
    std::error_code ec;
    fs::create_directories(fail_dir, ec);
    for (const fs::path& p : written) {
      if (fs::exists(p)) fs::rename(p, fail_dir / p.filename(), ec);
    }
  }
};

template <typename Fn>
void run_stage(const RunConfig& config, const std::string& name, Fn&& body) {
  config.validate();
  fs::path out_dir = config.out_dir;
  fs::create_directories(out_dir);
  Manifest manifest(out_dir);
  manifest.snapshot(config);
  StageFiles files{out_dir, name, {}};
  try {
    body(manifest, files);
  } catch (...) {
    files.quarantine();
    throw;
  }
  manifest.stamp(name);
  manifest.save();
}

int variant_order(const std::string& tag) {
  if (tag == "human") return -1;
  if (tag == "base") return 0;
  if (tag == "zeroshot:unique") return 1;
  if (tag == "zeroshot:novel") return 2;
  if (tag == "zeroshot:diverse") return 3;
  if (tag.rfind("fewshot:", 0) == 0) {
    try {
      return 4 + std::stoi(tag.substr(8));
    } catch (const std::exception&) {
      return 900;
    }
  }
  return 1000;
}

bool variant_tag_less(const std::string& a, const std::string& b) {
  int oa = variant_order(a), ob = variant_order(b);
  return oa != ob ? oa < ob : a < b;
}

std::uint64_t few_shot_seed(const RunConfig& config, int problem_id) {
  return config.seed ^ rng::fnv1a64("fewshot:p" + std::to_string(problem_id));
}

struct Selection {
  std::vector<corpus::DesignProblem> problems;      // selected, ascending id
  std::map<int, corpus::SolutionSet> human_sets;    // problem id -> human baseline
  std::vector<int> skipped_no_human;                // catalog entries without a baseline
};

Selection select_problems(const RunConfig& config) {
  Selection sel;
  std::vector<corpus::DesignProblem> catalog = corpus::load_problems(config.problems_path);
  std::vector<corpus::SolutionSet> sets = corpus::load_solution_sets(config.human_solutions_path);
  for (corpus::SolutionSet& set : sets) {
    if (set.source != corpus::Source::Human) {
      throw ValidationError("human solutions file contains a non-human set: " + set.key());
    }
    if (set.variant_tag != "human") {
      throw ValidationError("human sets must use variant_tag \"human\", got: " + set.key());
    }
    if (sel.human_sets.count(set.problem_id)) {
      throw ValidationError("duplicate human set for problem " +
                            std::to_string(set.problem_id));
    }
    sel.human_sets.emplace(set.problem_id, std::move(set));
  }

  std::map<int, corpus::DesignProblem> by_id;
  for (corpus::DesignProblem& p : catalog) by_id.emplace(p.id, std::move(p));

  if (!config.problem_ids.empty()) {
    std::set<int> wanted(config.problem_ids.begin(), config.problem_ids.end());
    for (int id : wanted) {
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        throw ConfigError("problem_ids references unknown problem " + std::to_string(id));
      }
      if (!sel.human_sets.count(id)) {
        throw ConfigError("problem " + std::to_string(id) + " has no human baseline in " +
                          config.human_solutions_path);
      }
      sel.problems.push_back(it->second);
    }
  } else {
    for (const auto& [id, problem] : by_id) {
      if (sel.human_sets.count(id)) {
        sel.problems.push_back(problem);
      } else {
        sel.skipped_no_human.push_back(id);
      }
    }
  }
  if (sel.problems.empty()) {
    throw ConfigError("no problems selected: nothing in " + config.problems_path +
                      " has a human baseline in " + config.human_solutions_path);
  }
  return sel;
}

void require_artifact(const fs::path& p, const std::string& producer) {
  if (!fs::exists(p)) {
    throw ConfigError("missing " + p.string() + "; run the " + producer + " stage first");
  }
}

}  // namespace

void cmd_prompts(const RunConfig& config) {
  run_stage(config, "prompts", [&](Manifest& manifest, StageFiles& files) {
    Selection sel = select_problems(config);
    manifest.record_input(config.problems_path);
    manifest.record_input(config.human_solutions_path);

    std::vector<json> rows;
    json exemplars = json::object();
    json seeds = json::object();
    json problem_ids = json::array();
    for (const corpus::DesignProblem& problem : sel.problems) {
      problem_ids.push_back(problem.id);
      std::vector<promptgen::PromptVariant> variants;
      if (config.run_base) variants.push_back(promptgen::BasePrompt{});
      for (promptgen::Adjective adjective : config.adjectives) {
        variants.push_back(promptgen::ZeroShotPrompt{adjective});
      }
      if (config.run_fewshot) {
        std::uint64_t seed = few_shot_seed(config, problem.id);
        seeds[std::to_string(problem.id)] = seed;
        const corpus::SolutionSet& human = sel.human_sets.at(problem.id);
        for (promptgen::PromptVariant& v :
             promptgen::sample_few_shot_variants(human, kFewShotRuns, seed)) {
          variants.push_back(std::move(v));
        }
      }
      for (const promptgen::PromptVariant& variant : variants) {
        promptgen::PromptSpec spec = promptgen::build_prompt(problem, variant);
        std::string tag = promptgen::variant_tag(variant);
        if (const auto* f = std::get_if<promptgen::FewShotPrompt>(&variant)) {
          exemplars["p" + std::to_string(problem.id) + ":" + tag] = f->exemplar_ref;
        }
        json row;
        row["problem_id"] = problem.id;
        row["variant_tag"] = tag;
        row["prompt"] = spec.text;
        rows.push_back(std::move(row));
      }
    }
    fs::path out = fs::path(config.out_dir) / "prompts.jsonl";
    files.wrote(out);
    jsonl::write_lines(out, rows);

    json stage;
    stage["outputs"] = {"prompts.jsonl"};
    stage["problems"] = problem_ids;
    stage["skipped_no_human"] = sel.skipped_no_human;
    stage["fewshot_exemplars"] = exemplars;
    stage["fewshot_seeds"] = seeds;
    manifest.set_stage("prompts", std::move(stage));
  });
}

void cmd_generate(const RunConfig& config) {
  run_stage(config, "generate", [&](Manifest& manifest, StageFiles& files) {
    fs::path prompts_path = fs::path(config.out_dir) / "prompts.jsonl";
    require_artifact(prompts_path, "prompts");

    struct PromptRow {
      int problem_id;
      std::string variant_tag;
      std::string prompt;
    };
    std::vector<PromptRow> prompts;
    jsonl::for_each_line(prompts_path, [&](std::size_t lineno, const json& j) {
      if (!j.contains("problem_id") || !j.contains("variant_tag") || !j.contains("prompt")) {
        throw ParseError(prompts_path.string(), lineno, "prompt row missing fields");
      }
      prompts.push_back({j["problem_id"].get<int>(), j["variant_tag"].get<std::string>(),
                         j["prompt"].get<std::string>()});
    });
    if (prompts.empty()) {
      throw ConfigError("prompts file is empty: " + prompts_path.string());
    }

    const json& exemplars = manifest.stage("prompts").contains("fewshot_exemplars")
                                ? manifest.stage("prompts")["fewshot_exemplars"]
                                : json::object();

    std::vector<json> rows;
    rows.reserve(prompts.size());
    auto make_row = [&](const PromptRow& p, const std::string& completion,
                        const std::string& endpoint, const std::string& received_at) {
      json row;
      row["problem_id"] = p.problem_id;
      row["variant_tag"] = p.variant_tag;
      row["prompt"] = p.prompt;
      row["raw_completion"] = completion;
      row["model"] = config.gen.model_name;
      row["temperature"] = config.gen.temperature;
      row["endpoint"] = endpoint;
      row["received_at"] = received_at;
      std::string ek = "p" + std::to_string(p.problem_id) + ":" + p.variant_tag;
      row["exemplar_ref"] = exemplars.contains(ek) ? exemplars[ek] : json(nullptr);
      row["rng_seed"] = config.seed;
      return row;
    };

    if (config.gen_mode == "fixtures") {
      std::map<std::pair<int, std::string>, std::string> completions;
      jsonl::for_each_line(config.gen_fixtures_path, [&](std::size_t lineno, const json& j) {
        if (!j.contains("problem_id") || !j.contains("variant_tag") ||
            !j.contains("raw_completion")) {
          throw ParseError(config.gen_fixtures_path, lineno,
                           "fixture row needs problem_id, variant_tag, raw_completion");
        }
        std::pair<int, std::string> key{j["problem_id"].get<int>(),
                                        j["variant_tag"].get<std::string>()};
        if (!completions.emplace(key, j["raw_completion"].get<std::string>()).second) {
          throw ValidationError("duplicate fixture completion for problem " +
                                std::to_string(key.first) + " variant " + key.second);
        }
      });
      for (const PromptRow& p : prompts) {
        auto it = completions.find({p.problem_id, p.variant_tag});
        if (it == completions.end()) {
          throw ConfigError("fixtures file " + config.gen_fixtures_path +
                            " has no completion for problem " + std::to_string(p.problem_id) +
                            " variant " + p.variant_tag);
        }
        // received_at is left empty so fixture replays are byte-stable
        rows.push_back(make_row(p, it->second, "fixtures", ""));
      }
      manifest.record_input(config.gen_fixtures_path);
    } else {
      if (config.gen.endpoint_url.empty()) {
        throw ConfigError("gen_mode=http needs gen_url");
      }
      std::vector<promptgen::PromptSpec> specs;
      specs.reserve(prompts.size());
      for (const PromptRow& p : prompts) {
        promptgen::PromptSpec spec;
        spec.problem_id = p.problem_id;
        spec.text = p.prompt;
        specs.push_back(std::move(spec));
      }
      std::vector<genclient::GenerationRecord> records =
          genclient::generate_many(specs, config.gen);
      for (std::size_t i = 0; i < prompts.size(); ++i) {
        rows.push_back(make_row(prompts[i], records[i].raw_completion, config.gen.endpoint_url,
                                records[i].received_at));
      }
    }

    fs::path out = fs::path(config.out_dir) / "generations.jsonl";
    files.wrote(out);
    jsonl::write_lines(out, rows);

    json stage;
    stage["outputs"] = {"generations.jsonl"};
    stage["mode"] = config.gen_mode;
    stage["completions"] = rows.size();
    manifest.set_stage("generate", std::move(stage));
  });
}

void cmd_parse(const RunConfig& config) {
  run_stage(config, "parse", [&](Manifest& manifest, StageFiles& files) {
    fs::path gens_path = fs::path(config.out_dir) / "generations.jsonl";
    require_artifact(gens_path, "generate");

    std::vector<corpus::Solution> solutions;
    json counts = json::object();
    jsonl::for_each_line(gens_path, [&](std::size_t lineno, const json& j) {
      if (!j.contains("problem_id") || !j.contains("variant_tag") ||
          !j.contains("raw_completion")) {
        throw ParseError(gens_path.string(), lineno, "generation row missing fields");
      }
      int problem_id = j["problem_id"].get<int>();
      std::string tag = j["variant_tag"].get<std::string>();
      std::vector<corpus::Solution> parsed =
          genclient::parse_numbered_list(j["raw_completion"].get<std::string>(), problem_id, tag);
      counts["p" + std::to_string(problem_id) + "-generated-" + tag] = parsed.size();
      for (corpus::Solution& s : parsed) solutions.push_back(std::move(s));
    });
    if (solutions.empty()) {
      throw ParseError("no solutions parsed from " + gens_path.string());
    }

    std::vector<json> lines;
    lines.reserve(solutions.size());
    for (const corpus::Solution& s : solutions) {
      json j;
      j["problem_id"] = s.problem_id;
      j["source"] = corpus::to_string(s.source);
      j["variant_tag"] = s.variant_tag;
      j["seq_index"] = s.seq_index ? json(*s.seq_index) : json(nullptr);
      j["raw_text"] = s.raw_text;
      j["normalized_text"] = s.normalized_text;
      lines.push_back(std::move(j));
    }
    fs::path out = fs::path(config.out_dir) / "solutions.jsonl";
    files.wrote(out);
    jsonl::write_lines(out, lines);

    json stage;
    stage["outputs"] = {"solutions.jsonl"};
    stage["set_counts"] = counts;
    manifest.set_stage("parse", std::move(stage));
  });
}

namespace {

std::unique_ptr<embedder::Provider> make_provider(const RunConfig& config) {
  if (config.provider == "stub") {
    return std::make_unique<embedder::StubProvider>(config.embed_dim);
  }
  if (config.provider == "file") {
    return std::make_unique<embedder::FileProvider>(config.embed_file);
  }
  return std::make_unique<embedder::HttpProvider>(config.embed_url, config.embed_dim, 64, 4,
                                                  config.embed_timeout_ms);
}

// Human set first, generated variants after, per problem ascending. Both the
// embed and metrics stages rely on this ordering staying put.
std::vector<corpus::SolutionSet> ordered_sets(const RunConfig& config, const Selection& sel,
                                              std::vector<corpus::SolutionSet> generated,
                                              std::vector<std::string>* notes) {
  std::map<int, std::vector<corpus::SolutionSet>> generated_by_problem;
  for (corpus::SolutionSet& set : generated) {
    if (set.source != corpus::Source::Generated) {
      throw ValidationError("solutions artifact contains a non-generated set: " + set.key());
    }
    generated_by_problem[set.problem_id].push_back(std::move(set));
  }
  std::vector<corpus::SolutionSet> ordered;
  std::set<int> selected_ids;
  for (const corpus::DesignProblem& p : sel.problems) selected_ids.insert(p.id);
  for (const corpus::DesignProblem& p : sel.problems) {
    ordered.push_back(sel.human_sets.at(p.id));
    auto it = generated_by_problem.find(p.id);
    if (it == generated_by_problem.end()) continue;
    std::sort(it->second.begin(), it->second.end(),
              [](const corpus::SolutionSet& a, const corpus::SolutionSet& b) {
                return variant_tag_less(a.variant_tag, b.variant_tag);
              });
    for (corpus::SolutionSet& set : it->second) ordered.push_back(std::move(set));
  }
  if (notes) {
    for (const auto& [id, sets] : generated_by_problem) {
      if (!selected_ids.count(id)) {
        notes->push_back("generated sets for unselected problem " + std::to_string(id) +
                         " ignored");
      }
    }
  }
  return ordered;
}

}  // namespace

void cmd_embed(const RunConfig& config) {
  run_stage(config, "embed", [&](Manifest& manifest, StageFiles& files) {
    fs::path solutions_path = fs::path(config.out_dir) / "solutions.jsonl";
    require_artifact(solutions_path, "parse");

    Selection sel = select_problems(config);
    std::vector<std::string> notes;
    std::vector<corpus::SolutionSet> sets =
        ordered_sets(config, sel, corpus::load_solution_sets(solutions_path), &notes);

    std::unique_ptr<embedder::Provider> provider = make_provider(config);
    std::vector<embedder::EmbeddingMatrix> matrices;
    matrices.reserve(sets.size());
    for (const corpus::SolutionSet& set : sets) {
      matrices.push_back(embedder::embed_set(set, *provider));
    }
    fs::path out = fs::path(config.out_dir) / "embeddings.jsonl";
    files.wrote(out);
    embedder::write_embeddings(out, matrices);
    if (config.provider == "file") manifest.record_input(config.embed_file);

    json stage;
    stage["outputs"] = {"embeddings.jsonl"};
    stage["provider"] = provider->name();
    stage["dim"] = provider->dim();
    stage["sets"] = matrices.size();
    stage["notes"] = notes;
    manifest.set_stage("embed", std::move(stage));
  });
}

namespace {

// Rebuilds per-set matrices by walking embeddings.jsonl in lockstep with the
// canonical set order; refs are cross-checked row by row.
std::vector<embedder::EmbeddingMatrix> matrices_from_artifacts(
    const RunConfig& config, const std::vector<corpus::SolutionSet>& sets,
    const fs::path& embeddings_path) {
  auto rows = embedder::load_embedding_rows(embeddings_path);
  std::size_t cursor = 0;
  std::vector<embedder::EmbeddingMatrix> matrices;
  int dim = 0;
  for (const corpus::SolutionSet& set : sets) {
    embedder::EmbeddingMatrix m;
    m.set_ref = set.key();
    for (std::size_t i = 0; i < set.solutions.size(); ++i) {
      std::string expected = corpus::solution_ref(set, i);
      if (cursor >= rows.size() || rows[cursor].first != expected) {
        throw IntegrityError("embeddings out of sync at " + expected +
                             "; re-run the embed stage");
      }
      if (dim == 0) dim = static_cast<int>(rows[cursor].second.size());
      if (static_cast<int>(rows[cursor].second.size()) != dim) {
        throw IntegrityError("embeddings mix dimensions; re-run the embed stage");
      }
      m.row_refs.push_back(expected);
      m.rows.push_back(std::move(rows[cursor].second));
      ++cursor;
    }
    m.dim = dim;
    matrices.push_back(std::move(m));
  }
  if (cursor != rows.size()) {
    throw IntegrityError("embeddings file has " + std::to_string(rows.size() - cursor) +
                         " unexpected trailing rows; re-run the embed stage");
  }
  return matrices;
}

}  // namespace

void cmd_metrics(const RunConfig& config) {
  run_stage(config, "metrics", [&](Manifest& manifest, StageFiles& files) {
    fs::path solutions_path = fs::path(config.out_dir) / "solutions.jsonl";
    fs::path embeddings_path = fs::path(config.out_dir) / "embeddings.jsonl";
    require_artifact(solutions_path, "parse");
    require_artifact(embeddings_path, "embed");

    Selection sel = select_problems(config);
    std::vector<corpus::SolutionSet> sets =
        ordered_sets(config, sel, corpus::load_solution_sets(solutions_path), nullptr);
    std::vector<embedder::EmbeddingMatrix> matrices =
        matrices_from_artifacts(config, sets, embeddings_path);

    // problem id -> variant tag -> matrix (human keyed as "human")
    std::map<int, std::map<std::string, embedder::EmbeddingMatrix>> by_problem;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      std::string tag =
          sets[i].source == corpus::Source::Human ? "human" : sets[i].variant_tag;
      by_problem[sets[i].problem_id].emplace(tag, std::move(matrices[i]));
    }

    json problems_json = json::array();
    std::map<std::string, double> variance_by_problem;
    for (const corpus::DesignProblem& problem : sel.problems) {
      auto& tag_map = by_problem.at(problem.id);
      const embedder::EmbeddingMatrix& human = tag_map.at("human");

      std::vector<std::string> generated_tags;
      for (const auto& [tag, m] : tag_map) {
        if (tag != "human") generated_tags.push_back(tag);
      }
      std::sort(generated_tags.begin(), generated_tags.end(), variant_tag_less);

      json similarity = json::array();
      std::vector<double> fewshot_means;
      for (const std::string& tag : generated_tags) {
        metrics::SimilarityResult r = metrics::nearest_generated_sample(human, tag_map.at(tag));
        json rj;
        rj["variant_tag"] = tag;
        rj["per_human"] = r.per_human;
        rj["mean"] = r.mean;
        rj["sd"] = r.sd;
        similarity.push_back(std::move(rj));
        if (tag.rfind("fewshot:", 0) == 0) fewshot_means.push_back(r.mean);
      }

      metrics::NoveltyResult novelty = metrics::novelty_volumes(problem.id, tag_map);
      variance_by_problem[std::to_string(problem.id)] = novelty.variance_explained_3;

      json volumes = json::array();
      std::vector<std::string> volume_tags;
      for (const auto& [tag, v] : novelty.per_set_volume) volume_tags.push_back(tag);
      std::sort(volume_tags.begin(), volume_tags.end(), variant_tag_less);
      std::vector<double> fewshot_volumes;
      for (const std::string& tag : volume_tags) {
        json vj;
        vj["variant_tag"] = tag;
        vj["volume"] = novelty.per_set_volume.at(tag);
        vj["degenerate"] = std::find(novelty.degenerate_sets.begin(),
                                     novelty.degenerate_sets.end(),
                                     tag) != novelty.degenerate_sets.end();
        volumes.push_back(std::move(vj));
        if (tag.rfind("fewshot:", 0) == 0) fewshot_volumes.push_back(novelty.per_set_volume.at(tag));
      }

      json pj;
      pj["problem_id"] = problem.id;
      pj["similarity"] = similarity;
      if (!fewshot_means.empty()) {
        metrics::FewShotAggregate agg = metrics::aggregate_few_shot(problem.id, fewshot_means);
        pj["fewshot_similarity"] = {
            {"run_values", agg.run_values}, {"mean", agg.mean}, {"sd", agg.sd}};
      } else {
        pj["fewshot_similarity"] = nullptr;
      }
      json nj;
      nj["variance_explained_3"] = novelty.variance_explained_3;
      nj["volumes"] = volumes;
      if (!fewshot_volumes.empty()) {
        metrics::FewShotAggregate agg = metrics::aggregate_few_shot(problem.id, fewshot_volumes);
        nj["fewshot"] = {{"run_values", agg.run_values}, {"mean", agg.mean}, {"sd", agg.sd}};
      } else {
        nj["fewshot"] = nullptr;
      }
      pj["novelty"] = std::move(nj);
      problems_json.push_back(std::move(pj));
    }

    json metrics_json;
    metrics_json["conventions"] = report::conventions_json();
    metrics_json["problems"] = std::move(problems_json);

    fs::path out = fs::path(config.out_dir) / "metrics.json";
    files.wrote(out);
    jsonl::write_file(out, metrics_json.dump(2) + "\n");
    manifest.set_variance_explained(variance_by_problem);

    json stage;
    stage["outputs"] = {"metrics.json"};
    stage["problems"] = sel.problems.size();
    manifest.set_stage("metrics", std::move(stage));
  });
}

void cmd_stats(const RunConfig& config) {
  run_stage(config, "stats", [&](Manifest& manifest, StageFiles& files) {
    fs::path metrics_path = fs::path(config.out_dir) / "metrics.json";
    json root;
    if (fs::exists(metrics_path)) {
      root = json::parse(jsonl::read_file(metrics_path));
    } else {
      root["conventions"] = report::conventions_json();
      root["problems"] = json::array();
    }

    json stats_json;
    stats_json["kappa"] = json::array();
    stats_json["anova"] = json::array();
    stats_json["summaries"] = json::array();
    std::vector<std::string> notes;

    if (config.ratings_path.empty()) {
      notes.push_back("no ratings file configured; statistics skipped");
    } else {
      std::vector<corpus::RatingRecord> records = corpus::load_ratings(config.ratings_path);
      manifest.record_input(config.ratings_path);

      for (const stats::RatingSummary& s : stats::summarize_ratings(records)) {
        stats_json["summaries"].push_back({{"problem_id", s.problem_id},
                                           {"source", corpus::to_string(s.source)},
                                           {"dimension", stats::to_string(s.dimension)},
                                           {"mean", s.mean},
                                           {"sd", s.sd},
                                           {"n", s.n}});
      }

      std::set<std::string> raters;
      for (const corpus::RatingRecord& r : records) raters.insert(r.rater_id);
      if (raters.size() != 2) {
        notes.push_back("kappa skipped: needs exactly 2 raters, found " +
                        std::to_string(raters.size()));
      } else {
        std::string rater_a = *raters.begin();
        std::string rater_b = *std::next(raters.begin());
        // (problem, source) -> ref -> rater -> record
        std::map<std::pair<int, std::string>,
                 std::map<std::string, std::map<std::string, const corpus::RatingRecord*>>>
            grid;
        for (const corpus::RatingRecord& r : records) {
          auto [problem_id, source] = stats::parse_canonical_ref(r.solution_ref);
          grid[{problem_id, corpus::to_string(source)}][r.solution_ref][r.rater_id] = &r;
        }
        for (const auto& [group, by_ref] : grid) {
          std::vector<int> a_f, b_f, a_n, b_n, a_u, b_u;
          for (const auto& [ref, by_rater] : by_ref) {
            auto ia = by_rater.find(rater_a);
            auto ib = by_rater.find(rater_b);
            if (ia == by_rater.end() || ib == by_rater.end()) continue;
            a_f.push_back(ia->second->feasibility);
            b_f.push_back(ib->second->feasibility);
            a_n.push_back(ia->second->novelty);
            b_n.push_back(ib->second->novelty);
            a_u.push_back(ia->second->usefulness);
            b_u.push_back(ib->second->usefulness);
          }
          if (a_f.empty()) continue;
          struct DimPair {
            const char* name;
            const std::vector<int>*a, *b;
          };
          for (const DimPair& dp : {DimPair{"feasibility", &a_f, &b_f},
                                    DimPair{"novelty", &a_n, &b_n},
                                    DimPair{"usefulness", &a_u, &b_u}}) {
            stats::KappaResult k = stats::cohen_kappa(*dp.a, *dp.b);
            stats_json["kappa"].push_back({{"problem_id", group.first},
                                           {"source", group.second},
                                           {"dimension", dp.name},
                                           {"kappa", k.kappa},
                                           {"observed_agreement", k.observed_agreement},
                                           {"expected_agreement", k.expected_agreement},
                                           {"n", k.n},
                                           {"band", stats::to_string(k.band)},
                                           {"degenerate", k.degenerate}});
          }
        }
      }

      // problem -> dimension -> [human values, generated values]
      std::map<int, std::array<std::pair<std::vector<double>, std::vector<double>>, 3>> anova_groups;
      for (const corpus::RatingRecord& r : records) {
        auto [problem_id, source] = stats::parse_canonical_ref(r.solution_ref);
        auto& dims = anova_groups[problem_id];
        const int values[3] = {r.feasibility, r.novelty, r.usefulness};
        for (int d = 0; d < 3; ++d) {
          auto& [human, generated] = dims[static_cast<std::size_t>(d)];
          (source == corpus::Source::Human ? human : generated)
              .push_back(static_cast<double>(values[d]));
        }
      }
      const char* dim_names[3] = {"feasibility", "novelty", "usefulness"};
      for (const auto& [problem_id, dims] : anova_groups) {
        for (int d = 0; d < 3; ++d) {
          const auto& [human, generated] = dims[static_cast<std::size_t>(d)];
          if (human.size() < 2 || generated.size() < 2) {
            notes.push_back("anova skipped for problem " + std::to_string(problem_id) + " " +
                            dim_names[d] + ": needs 2+ observations per group");
            continue;
          }
          stats::AnovaResult a = stats::one_way_anova({human, generated});
          stats_json["anova"].push_back(
              {{"problem_id", problem_id},
               {"dimension", dim_names[d]},
               {"f_stat", a.infinite_f ? json(nullptr) : json(a.f_stat)},
               {"df_between", a.df_between},
               {"df_within", a.df_within},
               {"p_value", a.p_value},
               {"group_means", {{"human", a.group_means[0]}, {"generated", a.group_means[1]}}},
               {"grand_mean", a.grand_mean},
               {"infinite_f", a.infinite_f}});
        }
      }
    }

    stats_json["notes"] = notes;
    root["stats"] = std::move(stats_json);
    files.wrote(metrics_path);
    jsonl::write_file(metrics_path, root.dump(2) + "\n");

    json stage;
    stage["outputs"] = {"metrics.json"};
    stage["notes"] = notes;
    manifest.set_stage("stats", std::move(stage));
  });
}

namespace {

std::string format_p_value(double p) {
  if (p < 0.0001) return "<0.0001";
  return report::format_number(p, 4);
}

}  // namespace

void cmd_report(const RunConfig& config) {
  run_stage(config, "report", [&](Manifest& manifest, StageFiles& files) {
    fs::path metrics_path = fs::path(config.out_dir) / "metrics.json";
    require_artifact(metrics_path, "metrics");
    json root = json::parse(jsonl::read_file(metrics_path));
    if (!root.contains("problems") || !root["problems"].is_array()) {
      throw ParseError(metrics_path.string(), 1, "metrics.json lacks a problems array");
    }

    std::vector<metrics::SimilarityResult> sim_results;
    std::vector<metrics::FewShotAggregate> sim_fewshot;
    std::vector<metrics::NoveltyResult> novelty_results;
    std::vector<metrics::FewShotAggregate> novelty_fewshot;
    for (const json& pj : root["problems"]) {
      int problem_id = pj["problem_id"].get<int>();
      for (const json& rj : pj["similarity"]) {
        std::string tag = rj["variant_tag"].get<std::string>();
        if (tag.rfind("fewshot:", 0) == 0) continue;  // folded into the aggregate column
        metrics::SimilarityResult r;
        r.problem_id = problem_id;
        r.variant_tag = tag;
        r.per_human = rj["per_human"].get<std::vector<double>>();
        r.mean = rj["mean"].get<double>();
        r.sd = rj["sd"].get<double>();
        sim_results.push_back(std::move(r));
      }
      if (pj.contains("fewshot_similarity") && !pj["fewshot_similarity"].is_null()) {
        const json& fj = pj["fewshot_similarity"];
        sim_fewshot.push_back(metrics::aggregate_few_shot(
            problem_id, fj["run_values"].get<std::vector<double>>()));
      }
      const json& nj = pj["novelty"];
      metrics::NoveltyResult n;
      n.problem_id = problem_id;
      n.variance_explained_3 = nj["variance_explained_3"].get<double>();
      for (const json& vj : nj["volumes"]) {
        std::string tag = vj["variant_tag"].get<std::string>();
        n.per_set_volume[tag] = vj["volume"].get<double>();
        if (vj["degenerate"].get<bool>()) n.degenerate_sets.push_back(tag);
      }
      novelty_results.push_back(std::move(n));
      if (!nj["fewshot"].is_null()) {
        novelty_fewshot.push_back(metrics::aggregate_few_shot(
            problem_id, nj["fewshot"]["run_values"].get<std::vector<double>>()));
      }
    }

    report::RenderedTable sim_table = report::render_similarity_table(sim_results, sim_fewshot);
    report::RenderedTable novelty_table =
        report::render_novelty_table(novelty_results, novelty_fewshot);

    std::vector<stats::RatingSummary> summaries;
    json kappa_rows = json::array();
    json anova_rows = json::array();
    json stats_notes = json::array();
    if (root.contains("stats")) {
      const json& sj = root["stats"];
      for (const json& s : sj["summaries"]) {
        stats::RatingSummary summary;
        summary.problem_id = s["problem_id"].get<int>();
        summary.source = corpus::source_from_string(s["source"].get<std::string>());
        std::string dim = s["dimension"].get<std::string>();
        summary.dimension = dim == "feasibility" ? stats::Dimension::Feasibility
                          : dim == "novelty"     ? stats::Dimension::Novelty
                                                 : stats::Dimension::Usefulness;
        summary.mean = s["mean"].get<double>();
        summary.sd = s["sd"].get<double>();
        summary.n = s["n"].get<int>();
        summaries.push_back(summary);
      }
      kappa_rows = sj["kappa"];
      anova_rows = sj["anova"];
      stats_notes = sj["notes"];
    }

    std::ostringstream md;
    md << "# Ideabench report\n\n";
    md << "Tool version " << kVersion << ".\n\n";
    md << "## Similarity to the human set (nearest generated sample)\n\n";
    md << sim_table.markdown << "\n";
    md << "## Design-space volume (3-d PCA convex hulls)\n\n";
    md << novelty_table.markdown << "\n";

    md << "## Expert rating statistics\n\n";
    if (kappa_rows.empty() && anova_rows.empty()) {
      md << "No rating statistics available.\n\n";
    } else {
      if (!kappa_rows.empty()) {
        md << "### Inter-rater agreement (Cohen's kappa)\n\n";
        md << "| Problem | Source | Dimension | Kappa | Observed | Expected | n | Band |\n";
        md << "|---|---|---|---|---|---|---|---|\n";
        for (const json& k : kappa_rows) {
          md << "| " << k["problem_id"].get<int>() << " | " << k["source"].get<std::string>()
             << " | " << k["dimension"].get<std::string>() << " | "
             << report::format_number(k["kappa"].get<double>(), 3)
             << (k["degenerate"].get<bool>() ? "*" : "") << " | "
             << report::format_number(k["observed_agreement"].get<double>(), 3) << " | "
             << report::format_number(k["expected_agreement"].get<double>(), 3) << " | "
             << k["n"].get<int>() << " | " << k["band"].get<std::string>() << " |\n";
        }
        md << "\n";
      }
      if (!anova_rows.empty()) {
        md << "### Human vs generated ratings (one-way ANOVA)\n\n";
        md << "| Problem | Dimension | F | df | p |\n";
        md << "|---|---|---|---|---|\n";
        for (const json& a : anova_rows) {
          md << "| " << a["problem_id"].get<int>() << " | " << a["dimension"].get<std::string>()
             << " | "
             << (a["infinite_f"].get<bool>() ? "inf"
                                             : report::format_number(a["f_stat"].get<double>(), 3))
             << " | (" << a["df_between"].get<int>() << ", " << a["df_within"].get<int>()
             << ") | " << format_p_value(a["p_value"].get<double>()) << " |\n";
        }
        md << "\n";
      }
    }

    md << "## Conventions\n\n";
    for (const auto& [key, value] : root["conventions"].items()) {
      md << "- " << key << ": " << value.get<std::string>() << "\n";
    }
    md << "\n## Notes\n\n";
    std::vector<std::string> notes;
    for (const std::string& n : sim_table.notes) notes.push_back("similarity: " + n);
    for (const std::string& n : novelty_table.notes) notes.push_back("novelty: " + n);
    for (const json& n : stats_notes) notes.push_back("stats: " + n.get<std::string>());
    if (summaries.empty()) notes.push_back("no rating summaries; ratings chart omitted");
    if (notes.empty()) {
      md << "None.\n";
    } else {
      for (const std::string& n : notes) md << "- " << n << "\n";
    }

    fs::path out_dir = config.out_dir;
    files.wrote(out_dir / "report.md");
    jsonl::write_file(out_dir / "report.md", md.str());
    files.wrote(out_dir / "similarity.csv");
    jsonl::write_file(out_dir / "similarity.csv", sim_table.csv);
    files.wrote(out_dir / "novelty.csv");
    jsonl::write_file(out_dir / "novelty.csv", novelty_table.csv);
    json outputs = {"report.md", "similarity.csv", "novelty.csv"};
    if (!summaries.empty()) {
      report::RenderedChart chart = report::render_ratings_chart(summaries);
      files.wrote(out_dir / "ratings.svg");
      jsonl::write_file(out_dir / "ratings.svg", chart.svg);
      files.wrote(out_dir / "ratings.csv");
      jsonl::write_file(out_dir / "ratings.csv", chart.csv);
      outputs.push_back("ratings.svg");
      outputs.push_back("ratings.csv");
    }

    json stage;
    stage["outputs"] = std::move(outputs);
    stage["notes"] = notes;
    manifest.set_stage("report", std::move(stage));
  });
}

void cmd_run_all(const RunConfig& config) {
  cmd_prompts(config);
  cmd_generate(config);
  cmd_parse(config);
  cmd_embed(config);
  cmd_metrics(config);
  cmd_stats(config);
  cmd_report(config);
}

}  // namespace ideabench::pipeline
