#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>

#include "tropescope/cli.hpp"
#include "tropescope/dataset.hpp"

namespace fs = std::filesystem;
using tropescope::cli::run;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("tropescope_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char kDump[] =
    "# sample dump\n"
    "<http://dbtropes.org/resource/Film/AlphaMovie> "
    "<http://skipforward.net/skipforward/resource/seeder/skipinions/hasFeature> "
    "<http://dbtropes.org/resource/Main/ShoutOut> .\n"
    "<http://dbtropes.org/resource/Film/AlphaMovie> "
    "<http://skipforward.net/skipforward/resource/seeder/skipinions/hasFeature> "
    "<http://dbtropes.org/resource/Main/BigBad> .\n"
    "<http://dbtropes.org/resource/Film/BetaFilm> "
    "<http://skipforward.net/skipforward/resource/seeder/skipinions/hasFeature> "
    "<http://dbtropes.org/resource/Main/ShoutOut> .\n"
    "<http://dbtropes.org/resource/Film/AlphaMovie> "
    "<http://www.w3.org/2000/01/rdf-schema#label> \"Alpha Movie\"@en .\n";

int run_cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("extract writes a loadable canonical dataset") {
  TempDir tmp;
  write_file(tmp.file("dump.nt"), kDump);

  std::string out;
  const int code =
      run_cli({"extract", "--input", tmp.file("dump.nt"), "--output", tmp.file("d.json")}, &out);
  CHECK(code == 0);
  CHECK(out.find("triples       4") != std::string::npos);
  CHECK(out.find("link triples  3") != std::string::npos);

  const auto d = tropescope::dataset::load_dataset_file(tmp.file("d.json"));
  CHECK(d.films.size() == 2);
  CHECK(d.films.at("AlphaMovie") == std::vector<std::string>{"BigBad", "ShoutOut"});
  CHECK(d.edge_count() == 3);
}

TEST_CASE("extract honors a config file") {
  TempDir tmp;
  write_file(tmp.file("dump.nt"),
             "<http://x/f/One> <http://x/uses> <http://x/t/Alpha> .\n"
             "<http://dbtropes.org/resource/Film/A> "
             "<http://skipforward.net/skipforward/resource/seeder/skipinions/hasFeature> "
             "<http://dbtropes.org/resource/Main/B> .\n");
  write_file(tmp.file("cfg.json"), R"({
    "film_iri_prefixes": ["http://x/f/"],
    "trope_iri_prefixes": ["http://x/t/"],
    "link_predicates": ["http://x/uses"]
  })");

  const int code = run_cli({"extract", "--input", tmp.file("dump.nt"), "--config",
                            tmp.file("cfg.json"), "--output", tmp.file("d.json")});
  CHECK(code == 0);
  const auto d = tropescope::dataset::load_dataset_file(tmp.file("d.json"));
  REQUIRE(d.films.size() == 1);
  CHECK(d.films.count("One") == 1);
}

TEST_CASE("extract exit codes") {
  TempDir tmp;

  SUBCASE("strict mode fails on a malformed line with exit 2") {
    write_file(tmp.file("bad.nt"), "<http://a/s> <http://a/p> <http://a/o> .\nbroken line\n");
    std::string err;
    const int code = run_cli({"extract", "--input", tmp.file("bad.nt"), "--policy", "strict",
                              "--output", tmp.file("d.json")},
                             nullptr, &err);
    CHECK(code == 2);
    CHECK(err.find("line 2") != std::string::npos);
  }
  SUBCASE("lenient mode skips it") {
    write_file(tmp.file("bad.nt"), "<http://a/s> <http://a/p> <http://a/o> .\nbroken line\n");
    std::string out;
    const int code = run_cli({"extract", "--input", tmp.file("bad.nt"), "--output",
                              tmp.file("d.json")},
                             &out);
    CHECK(code == 0);
    CHECK(out.find("skipped       1") != std::string::npos);
  }
  SUBCASE("missing input file is an I/O error") {
    const int code =
        run_cli({"extract", "--input", tmp.file("nope.nt"), "--output", tmp.file("d.json")});
    CHECK(code == 3);
  }
  SUBCASE("malformed config file is an input error") {
    write_file(tmp.file("dump.nt"), kDump);
    write_file(tmp.file("cfg.json"), R"({"film_iri_prefixes": ["http://x/"], "oops": 1})");
    const int code = run_cli({"extract", "--input", tmp.file("dump.nt"), "--config",
                              tmp.file("cfg.json"), "--output", tmp.file("d.json")});
    CHECK(code == 2);
  }
}

TEST_CASE("usage errors exit with 1") {
  CHECK(run_cli({}) == 1);
  CHECK(run_cli({"unknown-command"}) == 1);
  CHECK(run_cli({"extract", "--input", "x"}) == 1);              // missing --output
  CHECK(run_cli({"stats", "--dataset", "x", "--bogus"}) == 1);   // unknown flag
  CHECK(run_cli({"rank", "--dataset", "x", "--top", "0"}) == 1); // non-positive k
  CHECK(run_cli({"stats", "--dataset", "x", "--axis", "nope"}) == 1);
  CHECK(run_cli({"--help"}) == 0);
}

TEST_CASE("stats/fit/rank on a dataset file") {
  TempDir tmp;
  write_file(tmp.file("dump.nt"), kDump);
  REQUIRE(run_cli({"extract", "--input", tmp.file("dump.nt"), "--output", tmp.file("d.json")}) ==
          0);

  SUBCASE("stats text output") {
    std::string out;
    CHECK(run_cli({"stats", "--dataset", tmp.file("d.json"), "--axis", "films"}, &out) == 0);
    CHECK(out.find("Tropes per film") != std::string::npos);
    CHECK(out.find("n         2") != std::string::npos);
  }
  SUBCASE("stats json output") {
    std::string out;
    CHECK(run_cli({"stats", "--dataset", tmp.file("d.json"), "--json"}, &out) == 0);
    const auto j = nlohmann::json::parse(out);
    CHECK(j["films"]["n"] == 2);
    CHECK(j["tropes"]["n"] == 2);
  }
  SUBCASE("rank output") {
    std::string out;
    CHECK(run_cli({"rank", "--dataset", tmp.file("d.json"), "--axis", "films", "--top", "1"},
                  &out) == 0);
    CHECK(out.find("AlphaMovie") != std::string::npos);
    CHECK(out.find("BetaFilm") == std::string::npos);
  }
  SUBCASE("fit reports per-family failures on tiny degree sequences") {
    std::string out;
    const int code =
        run_cli({"fit", "--dataset", tmp.file("d.json"), "--axis", "films"}, &out);
    CHECK(code == 0);
    CHECK(out.find("failed") != std::string::npos);
    CHECK(out.find("at least 10") != std::string::npos);
  }
  SUBCASE("missing dataset file") {
    CHECK(run_cli({"stats", "--dataset", tmp.file("missing.json")}) == 3);
  }
  SUBCASE("corrupt dataset file") {
    write_file(tmp.file("corrupt.json"), "{broken");
    CHECK(run_cli({"stats", "--dataset", tmp.file("corrupt.json")}) == 2);
  }
}

TEST_CASE("report runs twice byte-identically") {
  TempDir tmp;

  // A dataset large enough for every family fit to proceed.
  tropescope::dataset::FilmTropeDataset d;
  std::mt19937_64 rng(9);
  for (int i = 0; i < 60; ++i) {
    std::vector<std::string> tropes;
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % 25);
    for (std::size_t j = 0; j < n; ++j) tropes.push_back("T" + std::to_string(rng() % 50));
    std::sort(tropes.begin(), tropes.end());
    tropes.erase(std::unique(tropes.begin(), tropes.end()), tropes.end());
    d.films["F" + std::to_string(i)] = std::move(tropes);
  }
  tropescope::dataset::save_dataset_file(d, tmp.file("d.json"));

  const auto rep1 = tmp.file("rep1");
  const auto rep2 = tmp.file("rep2");
  REQUIRE(run_cli({"report", "--dataset", tmp.file("d.json"), "--outdir", rep1}) == 0);
  REQUIRE(run_cli({"report", "--dataset", tmp.file("d.json"), "--outdir", rep2}) == 0);

  for (const char* name : {"report.md", "summary.json", "film_axis.svg", "trope_axis.svg"}) {
    CAPTURE(name);
    const auto a = read_file(rep1 + "/" + name);
    const auto b = read_file(rep2 + "/" + name);
    CHECK(!a.empty());
    CHECK(a == b);
  }
}

TEST_CASE("synth is seed-deterministic and honors --output") {
  TempDir tmp;
  std::string out1, out2, out3;
  CHECK(run_cli({"synth", "--family", "loglogistic", "--n", "50", "--seed", "7", "--shape", "2",
                 "--scale", "30"},
                &out1) == 0);
  CHECK(run_cli({"synth", "--family", "loglogistic", "--n", "50", "--seed", "7", "--shape", "2",
                 "--scale", "30"},
                &out2) == 0);
  CHECK(run_cli({"synth", "--family", "loglogistic", "--n", "50", "--seed", "8", "--shape", "2",
                 "--scale", "30"},
                &out3) == 0);
  CHECK(out1 == out2);
  CHECK(out1 != out3);
  CHECK(std::count(out1.begin(), out1.end(), '\n') == 50);

  CHECK(run_cli({"synth", "--family", "exponential", "--n", "10", "--seed", "1", "--output",
                 tmp.file("s.txt")}) == 0);
  const auto synth_file = read_file(tmp.file("s.txt"));
  CHECK(std::count(synth_file.begin(), synth_file.end(), '\n') == 10);

  CHECK(run_cli({"synth", "--family", "unknown"}) == 1);
  CHECK(run_cli({"synth", "--shape", "-1"}) == 1);
}

TEST_CASE("gzip dumps are accepted by extension-free sniffing") {
  TempDir tmp;
  // Compress with the library's own round trip: write plain, read, gzip via zlib
  // is covered in the parser tests; here just confirm the plain path again
  // through the CLI front door.
  write_file(tmp.file("dump.nt"), kDump);
  CHECK(run_cli({"extract", "--input", tmp.file("dump.nt"), "--output", tmp.file("d.json")}) == 0);
}
