#include <string>
#include <vector>

#include <doctest.h>

#include "helpers.hpp"
#include "ideabench/corpus.hpp"
#include "ideabench/errors.hpp"

using namespace ideabench;

TEST_CASE("normalize_text collapses whitespace and trims") {
  CHECK(corpus::normalize_text("  a   b\tc \r\n d  ") == "a b c d");
  CHECK(corpus::normalize_text("plain") == "plain");
  CHECK(corpus::normalize_text(" \t\n ") == "");
  CHECK(corpus::normalize_text("") == "");
}

TEST_CASE("load_problems returns the catalog sorted by id") {
  helpers::TempDir tmp("corpus");
  auto path = helpers::write_text(tmp.path / "problems.jsonl",
                                  "{\"id\": 2, \"text\": \"second thing\"}\n"
                                  "{\"id\": 1, \"text\": \"first thing\"}\n");
  auto problems = corpus::load_problems(path);
  REQUIRE(problems.size() == 2);
  CHECK(problems[0].id == 1);
  CHECK(problems[0].text == "first thing");
  CHECK(problems[1].id == 2);
}

TEST_CASE("load_problems rejects invalid catalogs") {
  helpers::TempDir tmp("corpus");
  auto write = [&](const std::string& body) {
    return helpers::write_text(tmp.path / "problems.jsonl", body);
  };
  CHECK_THROWS_AS(corpus::load_problems(write("{\"id\": 1, \"text\": \"ends badly.\"}\n")),
                  ValidationError);
  CHECK_THROWS_AS(corpus::load_problems(write("{\"id\": 1, \"text\": \"really?\"}\n")),
                  ValidationError);
  CHECK_THROWS_AS(corpus::load_problems(write("{\"id\": 0, \"text\": \"zero id\"}\n")),
                  ValidationError);
  CHECK_THROWS_AS(corpus::load_problems(write("{\"id\": 1, \"text\": \"\"}\n")),
                  ValidationError);
  CHECK_THROWS_AS(corpus::load_problems(write("{\"id\": 1, \"text\": \"a\"}\n"
                                              "{\"id\": 1, \"text\": \"b\"}\n")),
                  ValidationError);
  CHECK_THROWS_AS(corpus::load_problems(write("{\"id\": 1}\n")), ParseError);
  CHECK_THROWS_AS(corpus::load_problems(write("nonsense\n")), ParseError);
}

TEST_CASE("the checked-in catalog loads and has twelve problems") {
  auto problems = corpus::load_problems(helpers::source_dir() / "data" / "problems.jsonl");
  REQUIRE(problems.size() == 12);
  CHECK(problems[0].id == 1);
  CHECK(problems[0].text == "a lightweight exercise device that can be used while traveling");
  CHECK(problems[11].id == 12);
}

TEST_CASE("set keys and solution refs follow the canonical format") {
  corpus::SolutionSet set;
  set.problem_id = 4;
  set.source = corpus::Source::Generated;
  set.variant_tag = "zeroshot:novel";
  corpus::Solution a;
  a.seq_index = 9;
  corpus::Solution b;  // no seq: falls back to 1-based position
  set.solutions = {a, b};
  CHECK(set.key() == "p4-generated-zeroshot:novel");
  CHECK(corpus::solution_ref(set, 0) == "p4-generated-zeroshot:novel-9");
  CHECK(corpus::solution_ref(set, 1) == "p4-generated-zeroshot:novel-2");
  CHECK_THROWS_AS(corpus::solution_ref(set, 2), DomainError);
}

TEST_CASE("source names round-trip and reject unknowns") {
  CHECK(corpus::to_string(corpus::Source::Human) == "human");
  CHECK(corpus::source_from_string("generated") == corpus::Source::Generated);
  CHECK_THROWS_AS(corpus::source_from_string("martian"), ValidationError);
}

TEST_CASE("solution sets round-trip through jsonl preserving group order") {
  helpers::TempDir tmp("corpus");
  corpus::SolutionSet human;
  human.problem_id = 1;
  human.source = corpus::Source::Human;
  human.variant_tag = "human";
  corpus::Solution h;
  h.problem_id = 1;
  h.source = corpus::Source::Human;
  h.variant_tag = "human";
  h.raw_text = "a thing";
  h.normalized_text = "a thing";
  human.solutions = {h, h};

  corpus::SolutionSet gen = human;
  gen.source = corpus::Source::Generated;
  gen.variant_tag = "base";
  for (auto& s : gen.solutions) {
    s.source = corpus::Source::Generated;
    s.variant_tag = "base";
  }
  gen.solutions[0].seq_index = 1;
  gen.solutions[1].seq_index = 2;

  auto path = tmp.path / "solutions.jsonl";
  corpus::write_solution_sets(path, {gen, human});
  auto loaded = corpus::load_solution_sets(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].key() == "p1-generated-base");
  CHECK(loaded[1].key() == "p1-human-human");
  CHECK(loaded[0].solutions == gen.solutions);
  CHECK(loaded[1].solutions == human.solutions);
}

TEST_CASE("loading a solution with empty normalized text fails") {
  helpers::TempDir tmp("corpus");
  auto path = helpers::write_text(
      tmp.path / "solutions.jsonl",
      "{\"problem_id\": 1, \"source\": \"human\", \"variant_tag\": \"human\", "
      "\"seq_index\": null, \"raw_text\": \"x\", \"normalized_text\": \"\"}\n");
  CHECK_THROWS_AS(corpus::load_solution_sets(path), ValidationError);
}

TEST_CASE("ratings csv loads valid rows") {
  helpers::TempDir tmp("corpus");
  auto path = helpers::write_text(tmp.path / "ratings.csv",
                                  "solution_ref,rater_id,feasibility,novelty,usefulness\n"
                                  "p1-human-human-1,r1,0,1,2\n"
                                  "p1-human-human-1,r2,2,2,2\n");
  auto records = corpus::load_ratings(path);
  REQUIRE(records.size() == 2);
  CHECK(records[0].solution_ref == "p1-human-human-1");
  CHECK(records[0].rater_id == "r1");
  CHECK(records[0].feasibility == 0);
  CHECK(records[0].novelty == 1);
  CHECK(records[0].usefulness == 2);
}

TEST_CASE("ratings csv validation") {
  helpers::TempDir tmp("corpus");
  auto write = [&](const std::string& body) {
    return helpers::write_text(tmp.path / "ratings.csv", body);
  };
  const std::string header = "solution_ref,rater_id,feasibility,novelty,usefulness\n";
  CHECK_THROWS_AS(corpus::load_ratings(write("wrong,header,a,b,c\nx,r1,0,0,0\n")), ParseError);
  CHECK_THROWS_AS(corpus::load_ratings(write(header + "x,r1,0,3,0\n")), ValidationError);
  CHECK_THROWS_AS(corpus::load_ratings(write(header + "x,r1,-1,0,0\n")), ValidationError);
  CHECK_THROWS_AS(corpus::load_ratings(write(header + "x,r1,0,0\n")), ParseError);
  CHECK_THROWS_AS(corpus::load_ratings(write(header + "x,r1,zero,0,0\n")), ParseError);
  CHECK_THROWS_AS(corpus::load_ratings(write(header + "x,r1,0,0,0\nx,r1,1,1,1\n")),
                  ValidationError);
  CHECK_NOTHROW(corpus::load_ratings(write(header + "x,r1,0,0,0\nx,r2,1,1,1\n")));
}

TEST_CASE("the checked-in ratings fixture loads") {
  auto records = corpus::load_ratings(helpers::fixture("ratings.csv"));
  CHECK(records.size() == 48);
}
