#include "doctest.h"
#include "support/fixtures.hpp"
#include "treetag/corpus.hpp"
#include "treetag/errors.hpp"

using Tags = std::vector<std::string>;
using treetag::Chunk;

TEST_CASE("extract_chunks") {
  CHECK(treetag::extract_chunks({"B-NP", "I-NP", "O"}) == std::vector<Chunk>{{0, 1, "NP"}});
  CHECK(treetag::extract_chunks({"B-NP", "B-NP"}) == std::vector<Chunk>{{0, 0, "NP"}, {1, 1, "NP"}});
  // A stray I- tag opens a chunk, and a type change closes the previous one.
  CHECK(treetag::extract_chunks({"O", "I-NP", "I-NP"}) == std::vector<Chunk>{{1, 2, "NP"}});
  CHECK(treetag::extract_chunks({"B-NP", "I-VP", "I-VP", "O"}) ==
        std::vector<Chunk>{{0, 0, "NP"}, {1, 2, "VP"}});
  CHECK(treetag::extract_chunks({"B-VP", "I-VP"}).back().end == 1);
  CHECK(treetag::extract_chunks({"O", "O"}).empty());
}

TEST_CASE("evaluate: hand example") {
  const auto r = treetag::evaluate({{"B-NP", "I-NP", "O"}}, {{"B-NP", "O", "O"}});
  CHECK(r.accuracy == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.precision == 0.0);
  CHECK(r.recall == 0.0);
  CHECK(r.f1 == 0.0);
  CHECK(r.chunks.gold == 1);
  CHECK(r.chunks.predicted == 1);
  CHECK(r.chunks.correct == 0);
}

TEST_CASE("evaluate: identical sequences score 1") {
  const auto& toy = fixtures::toy_corpus();
  std::vector<Tags> gold;
  for (const auto& s : toy.heldout_raw) {
    Tags t;
    for (const auto& tok : s) t.push_back(tok.chunk);
    gold.push_back(t);
  }
  const auto r = treetag::evaluate(gold, gold);
  CHECK(r.accuracy == 1.0);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.f1 == 1.0);
  CHECK(r.per_type.at("NP").correct == r.per_type.at("NP").gold);
}

TEST_CASE("evaluate: partial credit") {
  // gold NP(0,1) VP(2,2) NP(3,3); predicted NP(0,1) NP(2,2) NP(3,3)
  const auto r = treetag::evaluate({{"B-NP", "I-NP", "B-VP", "B-NP"}},
                                   {{"B-NP", "I-NP", "B-NP", "B-NP"}});
  CHECK(r.accuracy == 0.75);
  CHECK(r.precision == doctest::Approx(2.0 / 3.0));
  CHECK(r.recall == doctest::Approx(2.0 / 3.0));
  CHECK(r.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(r.tokens == 4);
  CHECK(r.correct_tokens == 3);
}

TEST_CASE("evaluate: accuracy is micro-averaged over tokens") {
  const auto r = treetag::evaluate({{"O"}, {"O", "O", "O"}}, {{"B-NP"}, {"O", "O", "O"}});
  CHECK(r.accuracy == 0.75);
}

TEST_CASE("evaluate: misaligned input") {
  CHECK_THROWS_AS(treetag::evaluate({{"O"}}, {{"O"}, {"O"}}), treetag::InputError);
  CHECK_THROWS_AS(treetag::evaluate({{"O", "O"}}, {{"O"}}), treetag::InputError);
}
