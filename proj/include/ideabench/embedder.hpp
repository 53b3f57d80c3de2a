#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ideabench/corpus.hpp"

namespace ideabench::embedder {

using EmbeddingVector = std::vector<double>;

struct EmbeddingMatrix {
  std::string set_ref;  // SolutionSet::key()
  int dim = 0;
  std::vector<EmbeddingVector> rows;   // one per solution, same order
  std::vector<std::string> row_refs;   // solution_ref per row
};

struct EmbedRequest {
  std::string solution_ref;
  std::string text;
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::vector<EmbeddingVector> embed(const std::vector<EmbedRequest>& requests) = 0;
  virtual int dim() const = 0;
  virtual std::string name() const = 0;
};

// Deterministic test double: PRNG seeded from a stable hash of the text,
// dim standard normals, normalized to unit length.
EmbeddingVector stub_embed(const std::string& text, int dim);

class StubProvider : public Provider {
 public:
  explicit StubProvider(int dim = 384);
  std::vector<EmbeddingVector> embed(const std::vector<EmbedRequest>& requests) override;
  int dim() const override { return dim_; }
  std::string name() const override { return "stub"; }

 private:
  int dim_;
};

// Serves vectors from an embeddings.jsonl keyed by solution_ref.
class FileProvider : public Provider {
 public:
  explicit FileProvider(const std::filesystem::path& path);
  std::vector<EmbeddingVector> embed(const std::vector<EmbedRequest>& requests) override;
  int dim() const override { return dim_; }
  std::string name() const override { return "file"; }

 private:
  std::map<std::string, EmbeddingVector> by_ref_;
  int dim_ = 0;
};

// POSTs {"texts": [...]} and expects {"vectors": [[...], ...]}.
class HttpProvider : public Provider {
 public:
  HttpProvider(const std::string& url, int dim, int batch_size = 64, int concurrency = 4,
               int timeout_ms = 30000);
  std::vector<EmbeddingVector> embed(const std::vector<EmbedRequest>& requests) override;
  int dim() const override { return dim_; }
  std::string name() const override { return "http"; }

 private:
  std::string url_;
  int dim_;
  int batch_size_;
  int concurrency_;
  int timeout_ms_;
};

EmbeddingMatrix embed_set(const corpus::SolutionSet& set, Provider& provider);

// embeddings.jsonl: {"solution_ref": str, "vector": [float; dim]}.
void write_embeddings(const std::filesystem::path& path,
                      const std::vector<EmbeddingMatrix>& matrices);
std::vector<std::pair<std::string, EmbeddingVector>> load_embedding_rows(
    const std::filesystem::path& path);

}  // namespace ideabench::embedder
