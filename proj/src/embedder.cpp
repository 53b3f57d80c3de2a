#include "ideabench/embedder.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "ideabench/errors.hpp"
#include "ideabench/httpurl.hpp"
#include "ideabench/jsonl.hpp"
#include "ideabench/rng.hpp"

#include <httplib.h>
#include <json.hpp>

namespace ideabench::embedder {

using nlohmann::json;

EmbeddingVector stub_embed(const std::string& text, int dim) {
  if (dim < 2) throw DomainError("stub_embed: dim must be >= 2, got " + std::to_string(dim));
  std::mt19937_64 gen(rng::fnv1a64(text));
  EmbeddingVector v(static_cast<std::size_t>(dim));
  double norm_sq = 0.0;
  for (double& x : v) {
    x = rng::standard_normal(gen);
    norm_sq += x * x;
  }
  if (norm_sq == 0.0) throw NumericError("stub_embed: degenerate draw");
  double inv = 1.0 / std::sqrt(norm_sq);
  for (double& x : v) x *= inv;
  return v;
}

StubProvider::StubProvider(int dim) : dim_(dim) {
  if (dim < 2) throw ConfigError("stub provider dim must be >= 2");
}

std::vector<EmbeddingVector> StubProvider::embed(const std::vector<EmbedRequest>& requests) {
  std::vector<EmbeddingVector> out;
  out.reserve(requests.size());
  for (const EmbedRequest& r : requests) out.push_back(stub_embed(r.text, dim_));
  return out;
}

FileProvider::FileProvider(const std::filesystem::path& path) {
  for (auto& [ref, vec] : load_embedding_rows(path)) {
    if (dim_ == 0) dim_ = static_cast<int>(vec.size());
    if (static_cast<int>(vec.size()) != dim_) {
      throw IntegrityError("embedding file " + path.string() + " mixes dimensions (" +
                           std::to_string(dim_) + " and " + std::to_string(vec.size()) + ")");
    }
    by_ref_[ref] = std::move(vec);
  }
  if (by_ref_.empty()) throw ConfigError("embedding file has no rows: " + path.string());
}

std::vector<EmbeddingVector> FileProvider::embed(const std::vector<EmbedRequest>& requests) {
  std::vector<EmbeddingVector> out;
  std::string missing;
  for (const EmbedRequest& r : requests) {
    auto it = by_ref_.find(r.solution_ref);
    if (it == by_ref_.end()) {
      missing += missing.empty() ? r.solution_ref : ", " + r.solution_ref;
      continue;
    }
    out.push_back(it->second);
  }
  if (!missing.empty()) {
    throw IntegrityError("embedding file is missing refs: " + missing);
  }
  return out;
}

HttpProvider::HttpProvider(const std::string& url, int dim, int batch_size, int concurrency,
                           int timeout_ms)
    : url_(url), dim_(dim), batch_size_(batch_size), concurrency_(concurrency),
      timeout_ms_(timeout_ms) {
  if (dim < 2) throw ConfigError("http provider dim must be >= 2");
  if (batch_size < 1) throw ConfigError("http provider batch size must be >= 1");
  if (concurrency < 1) throw ConfigError("http provider concurrency must be >= 1");
}

std::vector<EmbeddingVector> HttpProvider::embed(const std::vector<EmbedRequest>& requests) {
  std::size_t n = requests.size();
  std::size_t batches = (n + static_cast<std::size_t>(batch_size_) - 1) /
                        static_cast<std::size_t>(batch_size_);
  std::vector<EmbeddingVector> out(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(batches);
  auto [base, path] = httpurl::split_url(url_);

  auto worker = [&]() {
    httplib::Client client(base);
    client.set_connection_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
    client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= batches) return;
      try {
        std::size_t lo = b * static_cast<std::size_t>(batch_size_);
        std::size_t hi = std::min(n, lo + static_cast<std::size_t>(batch_size_));
        json body;
        body["texts"] = json::array();
        for (std::size_t i = lo; i < hi; ++i) body["texts"].push_back(requests[i].text);
        auto res = client.Post(path, body.dump(), "application/json");
        if (!res) throw TransportError(0, "embedding endpoint unreachable: " + url_);
        if (res->status < 200 || res->status >= 300) {
          throw TransportError(res->status, "embedding endpoint returned " +
                                                std::to_string(res->status) + ": " +
                                                res->body.substr(0, 200));
        }
        json parsed = json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("vectors") ||
            !parsed["vectors"].is_array()) {
          throw IntegrityError("embedding response lacks a vectors array");
        }
        const json& vectors = parsed["vectors"];
        if (vectors.size() != hi - lo) {
          throw IntegrityError("embedding response has " + std::to_string(vectors.size()) +
                               " vectors for " + std::to_string(hi - lo) + " texts");
        }
        for (std::size_t i = lo; i < hi; ++i) {
          out[i] = vectors[i - lo].get<EmbeddingVector>();
        }
      } catch (...) {
        failures[b] = std::current_exception();
        return;
      }
    }
  };

  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(concurrency_), batches);
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : failures) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

EmbeddingMatrix embed_set(const corpus::SolutionSet& set, Provider& provider) {
  if (set.solutions.empty()) throw DomainError("embed_set: empty set " + set.key());
  std::vector<EmbedRequest> requests;
  requests.reserve(set.solutions.size());
  for (std::size_t i = 0; i < set.solutions.size(); ++i) {
    requests.push_back({corpus::solution_ref(set, i), set.solutions[i].normalized_text});
  }
  std::vector<EmbeddingVector> rows = provider.embed(requests);
  if (rows.size() != requests.size()) {
    throw IntegrityError("provider returned " + std::to_string(rows.size()) + " vectors for " +
                         std::to_string(requests.size()) + " solutions in " + set.key());
  }
  EmbeddingMatrix matrix;
  matrix.set_ref = set.key();
  matrix.dim = provider.dim();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<int>(rows[i].size()) != matrix.dim) {
      throw IntegrityError("provider returned dim " + std::to_string(rows[i].size()) +
                           " (expected " + std::to_string(matrix.dim) + ") for " +
                           requests[i].solution_ref);
    }
    double norm_sq = 0.0;
    for (double x : rows[i]) {
      if (!std::isfinite(x)) {
        throw ValidationError("non-finite embedding entry for " + requests[i].solution_ref);
      }
      norm_sq += x * x;
    }
    if (norm_sq == 0.0) {
      throw ValidationError("zero-norm embedding for " + requests[i].solution_ref);
    }
    matrix.row_refs.push_back(requests[i].solution_ref);
    matrix.rows.push_back(std::move(rows[i]));
  }
  return matrix;
}

void write_embeddings(const std::filesystem::path& path,
                      const std::vector<EmbeddingMatrix>& matrices) {
  std::vector<json> lines;
  for (const EmbeddingMatrix& m : matrices) {
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
      json j;
      j["solution_ref"] = m.row_refs[i];
      j["vector"] = m.rows[i];
      lines.push_back(std::move(j));
    }
  }
  jsonl::write_lines(path, lines);
}

std::vector<std::pair<std::string, EmbeddingVector>> load_embedding_rows(
    const std::filesystem::path& path) {
  std::vector<std::pair<std::string, EmbeddingVector>> rows;
  jsonl::for_each_line(path, [&](std::size_t lineno, const json& j) {
    if (!j.contains("solution_ref") || !j["solution_ref"].is_string() || !j.contains("vector") ||
        !j["vector"].is_array()) {
      throw ParseError(path.string(), lineno, "embedding row needs solution_ref and vector");
    }
    rows.emplace_back(j["solution_ref"].get<std::string>(), j["vector"].get<EmbeddingVector>());
  });
  return rows;
}

}  // namespace ideabench::embedder
