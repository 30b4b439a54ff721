#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "relx/embed.hpp"
#include "relx/error.hpp"
#include "testutil.hpp"

using namespace relx;

namespace {

VectorSpace space_of(
    const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
  VectorSpace s;
  s.dim = rows.empty() ? 0 : static_cast<int>(rows.front().second.size());
  for (const auto& [w, v] : rows) s.table.emplace(w, v);
  return s;
}

MappingConfig ct_config(double threshold = 0.4) {
  return {{"cause", "treat"}, threshold};
}

}  // namespace

TEST_CASE("load_vectors parses the word2vec text format") {
  testutil::TempDir tmp;
  testutil::spit(tmp.file("v.txt"), "2 3\ncause 1 0 0\ntreat 0 1 0\n");
  const VectorSpace s = load_vectors(tmp.file("v.txt"));
  CHECK(s.dim == 3);
  CHECK(s.table.size() == 2);
  REQUIRE(s.find("cause") != nullptr);
  CHECK(*s.find("cause") == std::vector<double>{1, 0, 0});
  CHECK(*s.find("treat") == std::vector<double>{0, 1, 0});
  CHECK(s.find("absent") == nullptr);
}

TEST_CASE("load_vectors flags arity mismatches with the line number") {
  testutil::TempDir tmp;
  testutil::spit(tmp.file("v.txt"), "2 3\ncause 1 0 0\ntreat 0 1\n");
  CHECK_THROWS_WITH_AS(load_vectors(tmp.file("v.txt")),
                       doctest::Contains(":3: expected 3 values"), Error);
}

TEST_CASE("load_vectors rejects empty or malformed headers") {
  testutil::TempDir tmp;
  testutil::spit(tmp.file("empty.txt"), "0 3\n");
  CHECK_THROWS_AS(load_vectors(tmp.file("empty.txt")), Error);
  testutil::spit(tmp.file("bad.txt"), "three four\n");
  CHECK_THROWS_AS(load_vectors(tmp.file("bad.txt")), Error);
  CHECK_THROWS_AS(load_vectors(tmp.file("missing.txt")), Error);
}

TEST_CASE("load_vectors keeps the first of duplicate tokens") {
  testutil::TempDir tmp;
  testutil::spit(tmp.file("v.txt"), "2 2\nword 1 0\nword 0 1\n");
  const VectorSpace s = load_vectors(tmp.file("v.txt"));
  CHECK(s.table.size() == 1);
  CHECK(*s.find("word") == std::vector<double>{1, 0});
}

TEST_CASE("load_vectors round-trips a large synthetic file") {
  testutil::TempDir tmp;
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  Rng rng(42);
  for (int i = 0; i < 10000; ++i) {
    rows.emplace_back("w" + std::to_string(i),
                      std::vector<double>{rng.unit(), rng.unit(), rng.unit()});
  }
  write_vectors(rows, 3, tmp.file("big.txt"));
  const VectorSpace s = load_vectors(tmp.file("big.txt"));
  REQUIRE(s.table.size() == 10000);
  for (int i : {0, 17, 4999, 9999}) {
    const auto& [w, v] = rows[static_cast<std::size_t>(i)];
    REQUIRE(s.find(w) != nullptr);
    for (int k = 0; k < 3; ++k) {
      CHECK((*s.find(w))[static_cast<std::size_t>(k)] ==
            doctest::Approx(v[static_cast<std::size_t>(k)]).epsilon(1e-9));
    }
  }
}

TEST_CASE("cosine matches hand arithmetic") {
  const std::vector<double> u{1, 2, 3}, v{4, 5, 6};
  CHECK(cosine(u, v) ==
        doctest::Approx(32.0 / (std::sqrt(14.0) * std::sqrt(77.0)))
            .epsilon(1e-12));
  CHECK(cosine(u, v) == doctest::Approx(0.97463).epsilon(1e-5));
}

TEST_CASE("cosine identity, orthogonality, and zero conventions") {
  const std::vector<double> v{0.3, -1.2, 7.5};
  CHECK(cosine(v, v) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
  CHECK(cosine(std::vector<double>{0, 0}, std::vector<double>{1, 1}) == 0.0);
  CHECK(cosine(std::vector<double>{1, 1}, std::vector<double>{0, 0}) == 0.0);
  CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{-1, 0}) ==
        doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("cosine stays clamped to [-1, 1]") {
  const std::vector<double> v{1e-154, 2e-154, 3e-154};
  const double c = cosine(v, v);
  CHECK(c <= 1.0);
  CHECK(c >= -1.0);
}

TEST_CASE("cosine rejects length mismatches") {
  CHECK_THROWS_AS(cosine(std::vector<double>{1, 2},
                         std::vector<double>{1, 2, 3}),
                  Error);
}

TEST_CASE("embed_phrase averages in-vocabulary lemmas") {
  const VectorSpace s =
      space_of({{"develop", {0.8, 0.2}}, {"cause", {1, 0}}, {"treat", {0, 1}}});
  const auto v = embed_phrase({"develop", "cause"}, s);
  REQUIRE(v.has_value());
  CHECK((*v)[0] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK((*v)[1] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("embed_phrase skips OOV lemmas and reports all-OOV as absent") {
  const VectorSpace s = space_of({{"treat", {0, 1}}});
  CHECK_FALSE(embed_phrase({"frobnicate"}, s).has_value());
  const auto v = embed_phrase({"frobnicate", "treat"}, s);
  REQUIRE(v.has_value());
  CHECK(*v == std::vector<double>{0, 1});
}

TEST_CASE("map_verb picks the closest type at or above the threshold") {
  const VectorSpace s =
      space_of({{"induce", {0.9, 0.1}}, {"cause", {1, 0}}, {"treat", {0, 1}}});
  const auto m = map_verb({"induce"}, ct_config(), s);
  REQUIRE(m.has_value());
  CHECK(m->rtype == "cause");
  CHECK(m->similarity == doctest::Approx(0.9 / std::sqrt(0.82)).epsilon(1e-12));
  CHECK(m->similarity == doctest::Approx(0.9939).epsilon(1e-4));
}

TEST_CASE("map_verb maps the exact-threshold boundary inclusively") {
  // cos((3,4,0,0),(10,5,10,20)) = 50 / (5 * 25), bit-equal to 0.4.
  const VectorSpace s = space_of(
      {{"edge", {3, 4, 0, 0}}, {"cause", {10, 5, 10, 20}}, {"treat", {0, 0, 1, -1}}});
  const auto m = map_verb({"edge"}, ct_config(0.4), s);
  REQUIRE(m.has_value());
  CHECK(m->rtype == "cause");
  CHECK(m->similarity == 0.4);
}

TEST_CASE("map_verb returns absent below the threshold") {
  const VectorSpace s =
      space_of({{"mention", {0.3, 0.3}}, {"cause", {1, 0}}, {"treat", {0, 1}}});
  // cos = 0.3/(sqrt(0.18)) ~ 0.707 to both; with threshold 0.8 nothing maps.
  CHECK_FALSE(map_verb({"mention"}, ct_config(0.8), s).has_value());
}

TEST_CASE("map_verb returns absent when the phrase is all-OOV") {
  const VectorSpace s = space_of({{"cause", {1, 0}}, {"treat", {0, 1}}});
  CHECK_FALSE(map_verb({"frobnicate"}, ct_config(), s).has_value());
}

TEST_CASE("map_verb breaks exact ties by configured order") {
  const VectorSpace s =
      space_of({{"mixed", {1, 1}}, {"cause", {1, 0}}, {"treat", {0, 1}}});
  const auto m = map_verb({"mixed"}, ct_config(), s);
  REQUIRE(m.has_value());
  CHECK(m->rtype == "cause");

  const VectorSpace s2 =
      space_of({{"mixed", {1, 1}}, {"treat", {0, 1}}, {"cause", {1, 0}}});
  const auto m2 = map_verb({"mixed"}, MappingConfig{{"treat", "cause"}, 0.4}, s2);
  REQUIRE(m2.has_value());
  CHECK(m2->rtype == "treat");
}

TEST_CASE("map_verb maps multi-word phrases through the mean") {
  const VectorSpace s =
      space_of({{"develop", {0.8, 0.2}}, {"cause", {1, 0}}, {"treat", {0, 1}}});
  const auto m = map_verb({"develop", "cause"}, ct_config(), s);
  REQUIRE(m.has_value());
  CHECK(m->rtype == "cause");
  // mean (0.9, 0.1); cosine = 0.9 / sqrt(0.82).
  CHECK(m->similarity == doctest::Approx(0.9 / std::sqrt(0.82)).epsilon(1e-12));
}

TEST_CASE("map_verb decisions are scale invariant") {
  const std::vector<std::pair<std::string, std::vector<double>>> base = {
      {"induce", {0.9, 0.1}}, {"cause", {1, 0}}, {"treat", {0, 1}}};
  const auto ref = map_verb({"induce"}, ct_config(), space_of(base));
  REQUIRE(ref.has_value());
  for (double scale : {0.001, 0.25, 3.0, 1024.0}) {
    auto scaled = base;
    for (auto& [w, v] : scaled) {
      for (double& x : v) x *= scale;
    }
    const auto m = map_verb({"induce"}, ct_config(), space_of(scaled));
    REQUIRE(m.has_value());
    CHECK(m->rtype == ref->rtype);
    CHECK(m->similarity == doctest::Approx(ref->similarity).epsilon(1e-12));
  }
}

TEST_CASE("check_mapping_config validates threshold and vocabulary") {
  const VectorSpace s = space_of({{"cause", {1, 0}}, {"treat", {0, 1}}});
  CHECK_NOTHROW(check_mapping_config(ct_config(), s));
  CHECK_NOTHROW(check_mapping_config(ct_config(0.0), s));
  CHECK_NOTHROW(check_mapping_config(ct_config(1.0), s));
  CHECK_THROWS_AS(check_mapping_config(ct_config(1.01), s), Error);
  CHECK_THROWS_AS(check_mapping_config(ct_config(-0.1), s), Error);
  CHECK_THROWS_AS(check_mapping_config(MappingConfig{{}, 0.4}, s), Error);
  CHECK_THROWS_WITH_AS(
      check_mapping_config(MappingConfig{{"cause", "prevent"}, 0.4}, s),
      doctest::Contains("prevent"), Error);
}

TEST_CASE("map_verb similarity equals cosine against the returned type") {
  const VectorSpace s = space_of({{"induce", {0.9, 0.1}},
                                  {"trigger", {0.7, 0.3}},
                                  {"cause", {1, 0}},
                                  {"treat", {0, 1}}});
  for (const std::string verb : {"induce", "trigger"}) {
    const auto m = map_verb({verb}, ct_config(), s);
    REQUIRE(m.has_value());
    CHECK(m->similarity ==
          doctest::Approx(cosine(*s.find(verb), *s.find(m->rtype)))
              .epsilon(1e-15));
    CHECK(m->similarity >= 0.4);
  }
}
