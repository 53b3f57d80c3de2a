#include "ideabench/genclient.hpp"

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <thread>

#include "ideabench/errors.hpp"
#include "ideabench/httpurl.hpp"

#include <httplib.h>
#include <json.hpp>

namespace ideabench::genclient {

using nlohmann::json;

void GenerationConfig::validate() const {
  std::vector<std::string> problems;
  if (temperature < 0.0 || temperature > 2.0) {
    problems.push_back("temperature must be in [0, 2]");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) problems.push_back("top_p must be in (0, 1]");
  if (max_tokens <= 0) problems.push_back("max_tokens must be positive");
  if (max_retries < 0) problems.push_back("max_retries must be >= 0");
  if (timeout_ms <= 0) problems.push_back("timeout_ms must be positive");
  if (retry_backoff_ms < 0) problems.push_back("retry_backoff_ms must be >= 0");
  if (concurrency < 1) problems.push_back("concurrency must be >= 1");
  if (!problems.empty()) {
    std::string msg = "invalid generation config:";
    for (const std::string& p : problems) msg += "\n  - " + p;
    throw ValidationError(msg);
  }
}

namespace {

std::string utc_now_iso8601() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool retryable_status(int status) { return status == 429 || (status >= 500 && status < 600); }

}  // namespace

GenerationRecord generate(const promptgen::PromptSpec& prompt, const GenerationConfig& config) {
  config.validate();
  if (config.endpoint_url.empty()) throw ConfigError("generation endpoint_url is not set");
  if (config.api_key_env.empty()) throw ConfigError("api_key_env is not set");
  const char* key = std::getenv(config.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw ConfigError("environment variable " + config.api_key_env + " is unset or empty");
  }

  auto [base, path] = httpurl::split_url(config.endpoint_url);
  httplib::Client client(base);
  client.set_connection_timeout(config.timeout_ms / 1000, (config.timeout_ms % 1000) * 1000);
  client.set_read_timeout(config.timeout_ms / 1000, (config.timeout_ms % 1000) * 1000);
  client.set_bearer_token_auth(key);

  json body;
  body["model"] = config.model_name;
  body["prompt"] = prompt.text;
  body["temperature"] = config.temperature;
  body["top_p"] = config.top_p;
  body["frequency_penalty"] = config.frequency_penalty;
  body["presence_penalty"] = config.presence_penalty;
  body["max_tokens"] = config.max_tokens;
  std::string payload = body.dump();

  int attempts = config.max_retries + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      long delay = static_cast<long>(config.retry_backoff_ms) << (attempt - 1);
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }
    auto res = client.Post(path, payload, "application/json");
    if (!res) {
      if (attempt + 1 < attempts) continue;
      throw TransportError(0, "completion endpoint unreachable after " +
                                  std::to_string(attempts) + " attempts: " + config.endpoint_url);
    }
    if (res->status < 200 || res->status >= 300) {
      if (retryable_status(res->status) && attempt + 1 < attempts) continue;
      throw TransportError(res->status, "completion endpoint returned " +
                                            std::to_string(res->status) + ": " +
                                            res->body.substr(0, 200));
    }
    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("choices") || !parsed["choices"].is_array() ||
        parsed["choices"].empty() || !parsed["choices"][0].contains("text")) {
      throw IntegrityError("completion response lacks choices[0].text: " +
                           res->body.substr(0, 200));
    }
    GenerationRecord record;
    record.prompt = prompt;
    record.raw_completion = parsed["choices"][0]["text"].get<std::string>();
    record.config_snapshot = config;
    record.received_at = utc_now_iso8601();
    return record;
  }
  throw TransportError(0, "completion request failed: " + config.endpoint_url);
}

std::vector<GenerationRecord> generate_many(const std::vector<promptgen::PromptSpec>& prompts,
                                            const GenerationConfig& config) {
  config.validate();
  std::vector<GenerationRecord> out(prompts.size());
  std::vector<std::exception_ptr> failures(prompts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= prompts.size()) return;
      try {
        out[i] = generate(prompts[i], config);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(config.concurrency), prompts.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : failures) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

namespace {

// A numbered line is optional whitespace, digits, '.' or ')', whitespace.
// Returns true and fills (number, rest_offset) on match.
bool match_numbered(const std::string& line, int& number, std::size_t& rest) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  std::size_t digits_start = i;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i == digits_start) return false;
  if (i >= line.size() || (line[i] != '.' && line[i] != ')')) return false;
  std::size_t delim = i;
  ++i;
  if (i >= line.size() || (line[i] != ' ' && line[i] != '\t')) return false;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  try {
    number = std::stoi(line.substr(digits_start, delim - digits_start));
  } catch (const std::exception&) {
    return false;  // digit run too long for an int; treat as prose
  }
  rest = i;
  return true;
}

}  // namespace

std::vector<corpus::Solution> parse_numbered_list(const std::string& raw, int problem_id,
                                                  const std::string& variant_tag) {
  struct Pending {
    int seq = 0;
    std::string raw_text;
    std::string body;
  };
  std::vector<Pending> pending;
  bool open = false;

  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t nl = raw.find('\n', pos);
    std::string line =
        nl == std::string::npos ? raw.substr(pos) : raw.substr(pos, nl - pos);
    pos = nl == std::string::npos ? raw.size() + 1 : nl + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (corpus::normalize_text(line).empty()) continue;

    int number = 0;
    std::size_t rest = 0;
    if (match_numbered(line, number, rest)) {
      Pending p;
      p.seq = number;
      std::size_t start = line.find_first_not_of(" \t");
      p.raw_text = line.substr(start);
      p.body = line.substr(rest);
      pending.push_back(std::move(p));
      open = true;
    } else if (open) {
      pending.back().raw_text += "\n" + line;
      pending.back().body += " " + line;
    }
    // else: preamble before the first numbered line, dropped
  }

  std::vector<corpus::Solution> solutions;
  for (Pending& p : pending) {
    std::string normalized = corpus::normalize_text(p.body);
    if (normalized.empty()) continue;
    corpus::Solution s;
    s.problem_id = problem_id;
    s.source = corpus::Source::Generated;
    s.variant_tag = variant_tag;
    s.seq_index = p.seq;
    s.raw_text = std::move(p.raw_text);
    s.normalized_text = std::move(normalized);
    solutions.push_back(std::move(s));
  }
  if (solutions.empty()) {
    throw ParseError("no numbered solutions found in completion: " + raw.substr(0, 200));
  }
  return solutions;
}

}  // namespace ideabench::genclient
