#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <zlib.h>

#include <random>

#include "support/generators.hpp"
#include "support/ntriples_fixtures.hpp"
#include "tropescope/ntriples.hpp"

using namespace tropescope::ntriples;
using testsupport::conformance_fixture;
using testsupport::fixture_document;

namespace {

std::vector<Triple> drain(TripleStream& stream) {
  std::vector<Triple> out;
  while (auto t = stream.next()) out.push_back(*t);
  return out;
}

std::string gzip_compress(const std::string& data) {
  z_stream zs{};
  REQUIRE(deflateInit2(&zs, Z_BEST_SPEED, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) == Z_OK);
  std::string out(deflateBound(&zs, data.size()), '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  REQUIRE(deflate(&zs, Z_FINISH) == Z_STREAM_END);
  out.resize(out.size() - zs.avail_out);
  deflateEnd(&zs);
  return out;
}

}  // namespace

TEST_CASE("parse_line basic forms") {
  Triple t;
  ParseIssue issue;

  CHECK(parse_line("<http://a/s> <http://a/p> <http://a/o> .", t, issue) == LineKind::Triple);
  CHECK(t.subject == Term::iri("http://a/s"));
  CHECK(t.predicate == "http://a/p");
  CHECK(t.object == Term::iri("http://a/o"));

  CHECK(parse_line("# comment", t, issue) == LineKind::Comment);
  CHECK(parse_line("", t, issue) == LineKind::Blank);

  CHECK(parse_line(R"(<http://a/s> <http://a/p> "hiA"@en .)", t, issue) == LineKind::Triple);
  CHECK(t.object == Term::literal("hiA", "en"));
}

TEST_CASE("conformance fixture parses to exact values") {
  const auto fx = conformance_fixture();
  REQUIRE(fx.size() >= 30);

  std::size_t malformed = 0;
  Triple t;
  ParseIssue issue;
  for (const auto& line : fx) {
    CAPTURE(line.text);
    const LineKind kind = parse_line(line.text, t, issue);
    CHECK(kind == line.kind);
    if (line.kind == LineKind::Triple) CHECK(t == line.expected);
    if (line.kind == LineKind::Error) {
      ++malformed;
      CHECK(!issue.message.empty());
    }
  }
  CHECK(malformed >= 8);
}

TEST_CASE("parse_stream counts and policies") {
  SUBCASE("all valid") {
    MemorySource src("<http://a/s> <http://a/p> <http://a/o> .\n"
                     "<http://a/s> <http://a/p> <http://a/o2> .\n"
                     "<http://a/s> <http://a/p> <http://a/o3> .\n");
    TripleStream stream(src, ParsePolicy::Lenient);
    CHECK(drain(stream).size() == 3);
    CHECK(stream.report().triples_emitted == 3);
    CHECK(stream.report().lines_skipped == 0);
    CHECK(!stream.report().first_error);
  }
  SUBCASE("lenient skips the malformed line") {
    MemorySource src("<http://a/s> <http://a/p> <http://a/o> .\n"
                     "<http://a/s> <http://a/p> <http://a/o2> .\n"
                     "this is not a triple\n");
    TripleStream stream(src, ParsePolicy::Lenient);
    CHECK(drain(stream).size() == 2);
    CHECK(stream.report().lines_skipped == 1);
    REQUIRE(stream.report().first_error);
    CHECK(stream.report().first_error->line == 3);
  }
  SUBCASE("strict stops at the malformed line") {
    MemorySource src("<http://a/s> <http://a/p> <http://a/o> .\n"
                     "<http://a/s> <http://a/p> <http://a/o2> .\n"
                     "this is not a triple\n");
    TripleStream stream(src, ParsePolicy::Strict);
    CHECK(stream.next());
    CHECK(stream.next());
    CHECK_THROWS_WITH_AS(stream.next(), doctest::Contains("line 3"), SyntaxError);
  }
  SUBCASE("line accounting invariant over the fixture") {
    const auto fx = conformance_fixture();
    const auto doc = fixture_document(fx);
    MemorySource src(doc);
    TripleStream stream(src, ParsePolicy::Lenient);
    drain(stream);
    const auto& r = stream.report();
    CHECK(r.lines_total == fx.size());
    CHECK(r.triples_emitted + r.lines_skipped + r.lines_ignored == r.lines_total);
  }
}

TEST_CASE("strict error carries the first malformed line number") {
  const auto fx = conformance_fixture();
  std::size_t expected_line = 0;
  for (std::size_t i = 0; i < fx.size(); ++i) {
    if (fx[i].kind == LineKind::Error) {
      expected_line = i + 1;
      break;
    }
  }
  const auto doc = fixture_document(fx);
  MemorySource src(doc);
  TripleStream stream(src, ParsePolicy::Strict);
  try {
    drain(stream);
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == expected_line);
  }
}

TEST_CASE("emitted order matches input order") {
  const auto fx = conformance_fixture();
  const auto doc = fixture_document(fx);
  MemorySource src(doc);
  TripleStream stream(src, ParsePolicy::Lenient);
  const auto got = drain(stream);

  std::vector<Triple> expected;
  for (const auto& line : fx)
    if (line.kind == LineKind::Triple) expected.push_back(line.expected);
  CHECK(got == expected);
}

TEST_CASE("canonical round-trip over generated triples") {
  std::mt19937_64 rng(20160701);
  Triple reparsed;
  ParseIssue issue;
  for (int i = 0; i < 10'000; ++i) {
    const Triple t = testsupport::random_triple(rng);
    const std::string line = to_ntriples(t);
    CAPTURE(line);
    REQUIRE(parse_line(line, reparsed, issue) == LineKind::Triple);
    REQUIRE(reparsed == t);
  }
}

TEST_CASE("memory use is bounded by the longest line, not input size") {
  const auto doc = fixture_document(conformance_fixture());

  const auto peak_after = [&](std::size_t times) {
    testsupport::RepeatSource src(doc, times);
    TripleStream stream(src, ParsePolicy::Lenient);
    while (stream.next()) {
    }
    return stream.peak_line_capacity();
  };
  const std::size_t peak10 = peak_after(10);
  const std::size_t peak100 = peak_after(100);
  CHECK(peak10 == peak100);

  std::size_t longest = 0;
  for (const auto& line : conformance_fixture()) longest = std::max(longest, line.text.size());
  CHECK(peak100 <= 2 * longest + 64);
}

TEST_CASE("gzip input is detected and inflated") {
  const std::string doc = "<http://a/s> <http://a/p> <http://a/o> .\n"
                          "<http://a/s2> <http://a/p> \"v\"@en .\n";
  const std::string gz = gzip_compress(doc);

  SUBCASE("single member") {
    auto src = autodetect_gzip(std::make_unique<MemorySource>(gz));
    TripleStream stream(*src, ParsePolicy::Strict);
    CHECK(drain(stream).size() == 2);
  }
  SUBCASE("concatenated members") {
    const std::string both = gz + gz;
    auto src = autodetect_gzip(std::make_unique<MemorySource>(both));
    TripleStream stream(*src, ParsePolicy::Strict);
    CHECK(drain(stream).size() == 4);
  }
  SUBCASE("plain input passes through") {
    auto src = autodetect_gzip(std::make_unique<MemorySource>(doc));
    TripleStream stream(*src, ParsePolicy::Strict);
    CHECK(drain(stream).size() == 2);
  }
  SUBCASE("truncated gzip raises IoError") {
    const std::string cut = gz.substr(0, gz.size() / 2);
    auto src = autodetect_gzip(std::make_unique<MemorySource>(cut));
    TripleStream stream(*src, ParsePolicy::Lenient);
    CHECK_THROWS_AS(drain(stream), IoError);
  }
}

TEST_CASE("I/O failure propagates distinctly from syntax failure") {
  testsupport::FailingSource src("<http://a/s> <http://a/p> <http://a/o> .\n<http://a/");
  TripleStream stream(src, ParsePolicy::Lenient);
  CHECK(stream.next());
  CHECK_THROWS_AS(stream.next(), IoError);
}

TEST_CASE("parse_blocks matches the streaming parser") {
  const auto fx = conformance_fixture();
  const auto doc = fixture_document(fx);

  MemorySource serial_src(doc);
  TripleStream stream(serial_src, ParsePolicy::Lenient);
  const auto serial_triples = drain(stream);
  const auto serial_report = stream.report();

  for (const std::size_t block_bytes : {std::size_t{7}, std::size_t{64}, std::size_t{1 << 20}}) {
    CAPTURE(block_bytes);
    MemorySource src(doc);
    std::vector<Triple> parallel_triples;
    const auto report = parse_blocks(
        src, ParsePolicy::Lenient,
        [&](std::span<const Triple> batch) {
          parallel_triples.insert(parallel_triples.end(), batch.begin(), batch.end());
        },
        block_bytes);
    CHECK(parallel_triples == serial_triples);
    CHECK(report.lines_total == serial_report.lines_total);
    CHECK(report.triples_emitted == serial_report.triples_emitted);
    CHECK(report.lines_skipped == serial_report.lines_skipped);
    CHECK(report.lines_ignored == serial_report.lines_ignored);
    REQUIRE(report.first_error);
    CHECK(report.first_error->line == serial_report.first_error->line);
  }
}

TEST_CASE("parse_blocks strict mode reports the same line number") {
  const auto fx = conformance_fixture();
  const auto doc = fixture_document(fx);
  std::size_t expected_line = 0;
  for (std::size_t i = 0; i < fx.size(); ++i) {
    if (fx[i].kind == LineKind::Error) {
      expected_line = i + 1;
      break;
    }
  }
  MemorySource src(doc);
  try {
    parse_blocks(src, ParsePolicy::Strict, [](std::span<const Triple>) {}, 64);
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == expected_line);
  }
}

TEST_CASE("parse_blocks handles a line longer than the block") {
  std::string big = "<http://a/s> <http://a/p> \"";
  big.append(5000, 'x');
  big += "\" .\n<http://a/s2> <http://a/p> <http://a/o> .\n";
  MemorySource src(big);
  std::size_t count = 0;
  const auto report = parse_blocks(
      src, ParsePolicy::Strict,
      [&](std::span<const Triple> batch) { count += batch.size(); }, 128);
  CHECK(count == 2);
  CHECK(report.triples_emitted == 2);
}

TEST_CASE("streaming and block parsers agree on random documents") {
  std::mt19937_64 rng(777);
  for (int round = 0; round < 20; ++round) {
    std::string doc;
    const int nlines = 1 + static_cast<int>(rng() % 60);
    for (int i = 0; i < nlines; ++i) {
      switch (rng() % 6) {
        case 0: doc += "# note\n"; break;
        case 1: doc += "\n"; break;
        case 2: doc += "garbled " + std::to_string(rng()) + "\n"; break;
        case 3: {
          std::string padding(rng() % 300, 'y');
          doc += "<http://a/s> <http://a/p> \"" + padding + "\" .\r\n";
          break;
        }
        default: doc += to_ntriples(testsupport::random_triple(rng)) + "\n"; break;
      }
    }
    if (rng() % 2 == 0 && !doc.empty()) doc.pop_back();  // sometimes no final newline

    MemorySource serial_src(doc);
    TripleStream stream(serial_src, ParsePolicy::Lenient);
    const auto expect = drain(stream);

    const std::size_t block = 1 + rng() % 200;
    MemorySource src(doc);
    std::vector<Triple> got;
    const auto report = parse_blocks(
        src, ParsePolicy::Lenient,
        [&](std::span<const Triple> batch) { got.insert(got.end(), batch.begin(), batch.end()); },
        block);
    CAPTURE(round);
    CAPTURE(block);
    CHECK(got == expect);
    CHECK(report.lines_total == stream.report().lines_total);
    CHECK(report.lines_skipped == stream.report().lines_skipped);
  }
}

TEST_CASE("final line without newline is parsed") {
  MemorySource src("<http://a/s> <http://a/p> <http://a/o> .");
  TripleStream stream(src, ParsePolicy::Strict);
  CHECK(drain(stream).size() == 1);
}

TEST_CASE("crlf line endings are accepted") {
  MemorySource src("<http://a/s> <http://a/p> <http://a/o> .\r\n# c\r\n");
  TripleStream stream(src, ParsePolicy::Strict);
  CHECK(drain(stream).size() == 1);
  CHECK(stream.report().lines_ignored == 1);
}
