#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "support/generators.hpp"
#include "tropescope/dataset.hpp"

using namespace tropescope::dataset;

TEST_CASE("canonical save bytes") {
  SUBCASE("small dataset") {
    FilmTropeDataset d;
    d.films["A"] = {"x"};
    const std::string expected =
        "{\n"
        "  \"films\": {\n"
        "    \"A\": [\n"
        "      \"x\"\n"
        "    ]\n"
        "  },\n"
        "  \"version\": 1\n"
        "}\n";
    CHECK(save_dataset_string(d) == expected);
  }
  SUBCASE("empty dataset") {
    const std::string expected =
        "{\n"
        "  \"films\": {},\n"
        "  \"version\": 1\n"
        "}\n";
    CHECK(save_dataset_string(FilmTropeDataset{}) == expected);
  }
  SUBCASE("save through a stream reports the byte count") {
    FilmTropeDataset d;
    d.films["A"] = {"x"};
    std::ostringstream out;
    const std::size_t n = save_dataset(d, out);
    CHECK(n == out.str().size());
    CHECK(out.str() == save_dataset_string(d));
  }
}

TEST_CASE("save/load round-trip is stable") {
  std::mt19937_64 rng(31337);
  for (int i = 0; i < 50; ++i) {
    const auto d = testsupport::random_dataset(rng);
    const auto bytes = save_dataset_string(d);
    const auto loaded = load_dataset_string(bytes);
    CHECK(loaded == d);
    CHECK(save_dataset_string(loaded) == bytes);
  }
}

TEST_CASE("load normalizes semantically equivalent input") {
  const auto d = load_dataset_string(R"({
    "version": 1,
    "films": {"B": ["z", "a", "z"], "A": ["q"]}
  })");
  CHECK(d.films.at("B") == std::vector<std::string>{"a", "z"});
  CHECK(d.films.at("A") == std::vector<std::string>{"q"});
  CHECK(d.edge_count() == 3);
}

TEST_CASE("load drops films with no tropes") {
  const auto d = load_dataset_string(R"({"version": 1, "films": {"A": ["x"], "B": []}})");
  CHECK(d.films.size() == 1);
  CHECK(d.films.count("A") == 1);
}

TEST_CASE("load rejects malformed input with distinct messages") {
  auto message_of = [](const char* text) {
    try {
      load_dataset_string(text);
      return std::string("(no error)");
    } catch (const DatasetFormatError& e) {
      return std::string(e.what());
    }
  };

  CHECK(message_of("{nope").find("malformed") != std::string::npos);
  CHECK(message_of(R"({"films": {}})").find("version") != std::string::npos);
  CHECK(message_of(R"({"version": 2, "films": {}})").find("version") != std::string::npos);
  CHECK(message_of(R"({"version": 1})").find("films") != std::string::npos);
  CHECK(message_of(R"({"version": 1, "films": {"A": ["x"], "A": ["y"]}})").find("duplicate") !=
        std::string::npos);
  CHECK(message_of(R"({"version": 1, "films": {"A": [1]}})").find("non-string") !=
        std::string::npos);
  CHECK(message_of(R"({"version": 1, "films": {"A": "x"}})").find("array") != std::string::npos);
  CHECK(message_of(R"({"version": 1, "films": {"A": [""]}})").find("empty") != std::string::npos);
  CHECK(message_of(R"({"version": 1, "films": {"": ["x"]}})").find("empty") != std::string::npos);
  CHECK(message_of(R"({"version": 1, "films": {}, "extra": 0})").find("unknown") !=
        std::string::npos);
  CHECK(message_of(R"([1, 2])").find("object") != std::string::npos);
}

TEST_CASE("reverse_index transposes the mapping") {
  FilmTropeDataset d;
  d.films["A"] = {"x", "y"};
  d.films["B"] = {"x"};
  const auto r = reverse_index(d);
  REQUIRE(r.tropes.size() == 2);
  CHECK(r.tropes.at("x") == std::vector<std::string>{"A", "B"});
  CHECK(r.tropes.at("y") == std::vector<std::string>{"A"});
  CHECK(r.edge_count() == d.edge_count());
}

TEST_CASE("transpose is an involution") {
  std::mt19937_64 rng(555);
  for (int i = 0; i < 20; ++i) {
    const auto d = testsupport::random_dataset(rng);
    const auto r = reverse_index(d);
    FilmTropeDataset flipped;
    flipped.films = r.tropes;  // same structure, axes swapped
    const auto back = reverse_index(flipped);
    CHECK(back.tropes == d.films);
  }
}

TEST_CASE("edge sums agree on both axes for random datasets") {
  std::mt19937_64 rng(808);
  for (int i = 0; i < 30; ++i) {
    const auto d = testsupport::random_dataset(rng);
    const auto r = reverse_index(d);
    CHECK(d.edge_count() == r.edge_count());
    CHECK_NOTHROW(check_consistency(d, r));
  }
}

TEST_CASE("reverse film lists are sorted and unique") {
  std::mt19937_64 rng(99);
  const auto d = testsupport::random_dataset(rng, 40);
  const auto r = reverse_index(d);
  for (const auto& [trope, films] : r.tropes) {
    CAPTURE(trope);
    CHECK(std::is_sorted(films.begin(), films.end()));
    CHECK(std::adjacent_find(films.begin(), films.end()) == films.end());
  }
}
