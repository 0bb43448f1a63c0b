#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tropescope::ntriples {

enum class TermKind : std::uint8_t { Iri, Blank, Literal };

struct Term {
  TermKind kind = TermKind::Iri;
  std::string value;     // IRI text, blank node label, or literal lexical form
  std::string lang;      // language tag (literals only)
  std::string datatype;  // datatype IRI (literals only)

  bool operator==(const Term&) const = default;

  static Term iri(std::string v) { return {TermKind::Iri, std::move(v), {}, {}}; }
  static Term blank(std::string label) { return {TermKind::Blank, std::move(label), {}, {}}; }
  static Term literal(std::string v, std::string lang = {}, std::string datatype = {}) {
    return {TermKind::Literal, std::move(v), std::move(lang), std::move(datatype)};
  }
};

struct Triple {
  Term subject;           // Iri or Blank
  std::string predicate;  // always an IRI
  Term object;

  bool operator==(const Triple&) const = default;
};

enum class LineKind { Triple, Comment, Blank, Error };

struct ParseIssue {
  std::size_t column = 0;  // 0-based byte offset into the line
  std::string message;
};

// Escape sequences are decoded; a terminating "." is required for a triple.
LineKind parse_line(std::string_view line, Triple& out, ParseIssue& issue);

// Canonical single-line form without trailing newline. Reparsing it yields an
// identical Triple.
std::string to_ntriples(const Triple& t);
void append_term(std::string& out, const Term& t);

struct FirstError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct ParseReport {
  std::size_t lines_total = 0;
  std::size_t triples_emitted = 0;
  std::size_t lines_skipped = 0;
  std::size_t lines_ignored = 0;  // comments and blank lines
  std::optional<FirstError> first_error;
};

enum class ParsePolicy { Strict, Lenient };

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pull-based byte stream. read() returns 0 at end of input and throws IoError
// on failure.
class ByteSource {
 public:
  virtual ~ByteSource() = default;
  virtual std::size_t read(char* dst, std::size_t cap) = 0;
};

class MemorySource final : public ByteSource {
 public:
  explicit MemorySource(std::string_view data) : data_(data) {}
  std::size_t read(char* dst, std::size_t cap) override;

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

class FileSource final : public ByteSource {
 public:
  explicit FileSource(const std::string& path);
  ~FileSource() override;
  FileSource(const FileSource&) = delete;
  FileSource& operator=(const FileSource&) = delete;
  std::size_t read(char* dst, std::size_t cap) override;

 private:
  void* file_ = nullptr;  // FILE*
  std::string path_;
};

// Inflates a gzip stream, including concatenated members.
class GzipSource final : public ByteSource {
 public:
  explicit GzipSource(std::unique_ptr<ByteSource> inner);
  ~GzipSource() override;
  GzipSource(const GzipSource&) = delete;
  GzipSource& operator=(const GzipSource&) = delete;
  std::size_t read(char* dst, std::size_t cap) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Sniffs the gzip magic bytes (0x1F 0x8B) and wraps the source accordingly.
std::unique_ptr<ByteSource> autodetect_gzip(std::unique_ptr<ByteSource> inner);
std::unique_ptr<ByteSource> open_input(const std::string& path);

// Splits a byte source into lines with a single reused buffer, so memory is
// bounded by the longest line.
class LineScanner {
 public:
  explicit LineScanner(ByteSource& src) : src_(&src) {}
  std::optional<std::string_view> next_line();
  std::size_t peak_line_capacity() const { return peak_capacity_; }

 private:
  bool fill();

  ByteSource* src_;
  std::vector<char> buf_ = std::vector<char>(64 * 1024);
  std::size_t buf_len_ = 0;
  std::size_t buf_pos_ = 0;
  bool eof_ = false;
  std::string line_;
  std::size_t peak_capacity_ = 0;
};

// One-pass triple iterator over a byte source. Under the lenient policy
// malformed lines are counted and skipped; under strict the first one throws
// SyntaxError with its line number. I/O failures surface as IoError either way.
class TripleStream {
 public:
  TripleStream(ByteSource& src, ParsePolicy policy)
      : scanner_(src), policy_(policy) {}

  std::optional<Triple> next();
  const ParseReport& report() const { return report_; }
  std::size_t peak_line_capacity() const { return scanner_.peak_line_capacity(); }

 private:
  LineScanner scanner_;
  ParsePolicy policy_;
  ParseReport report_;
  Triple triple_;
  ParseIssue issue_;
};

// Block-parallel parser: reads blocks of roughly block_bytes, splits them at
// line boundaries and parses the lines concurrently. Triples reach the sink in
// input order and the report matches TripleStream exactly.
inline constexpr std::size_t kDefaultBlockBytes = 4 * 1024 * 1024;

ParseReport parse_blocks(ByteSource& src, ParsePolicy policy,
                         const std::function<void(std::span<const Triple>)>& sink,
                         std::size_t block_bytes = kDefaultBlockBytes);

}  // namespace tropescope::ntriples
