#include "tropescope/ntriples.hpp"

#include <zlib.h>

#include <cerrno>
#include <cstdio>
#include <cstring>

namespace tropescope::ntriples {

namespace {

bool is_ws(char c) { return c == ' ' || c == '\t'; }
bool is_hex(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}
unsigned hex_val(char c) {
  if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
  if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
  return static_cast<unsigned>(c - 'A' + 10);
}
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

struct LineParser {
  std::string_view s;
  std::size_t i = 0;
  ParseIssue* issue;

  bool fail(std::size_t at, std::string msg) {
    issue->column = at;
    issue->message = std::move(msg);
    return false;
  }

  void skip_ws() {
    while (i < s.size() && is_ws(s[i])) ++i;
  }

  bool at_end() const { return i >= s.size(); }

  // \uXXXX or \UXXXXXXXX, cursor on the 'u'/'U'.
  bool decode_uchar(std::string& out) {
    const std::size_t start = i - 1;
    const std::size_t ndigits = s[i] == 'u' ? 4 : 8;
    ++i;
    if (i + ndigits > s.size()) return fail(start, "truncated \\u escape");
    std::uint32_t cp = 0;
    for (std::size_t k = 0; k < ndigits; ++k) {
      const char c = s[i + k];
      if (!is_hex(c)) return fail(start, "non-hex digit in \\u escape");
      cp = (cp << 4) | hex_val(c);
    }
    i += ndigits;
    if (cp > 0x10FFFF) return fail(start, "code point out of range in \\u escape");
    if (cp >= 0xD800 && cp <= 0xDFFF) return fail(start, "surrogate code point in \\u escape");
    append_utf8(out, cp);
    return true;
  }

  // Cursor on '<'.
  bool parse_iri(std::string& out) {
    const std::size_t start = i;
    ++i;
    out.clear();
    while (i < s.size()) {
      const char c = s[i];
      if (c == '>') {
        ++i;
        return true;
      }
      if (c == '\\') {
        ++i;
        if (i >= s.size() || (s[i] != 'u' && s[i] != 'U'))
          return fail(i - 1, "only \\u and \\U escapes are allowed in IRIs");
        if (!decode_uchar(out)) return false;
        continue;
      }
      if (static_cast<unsigned char>(c) <= 0x20)
        return fail(i, "control character or space in IRI");
      if (c == '<' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' || c == '`')
        return fail(i, std::string("character '") + c + "' must be escaped in IRIs");
      out.push_back(c);
      ++i;
    }
    return fail(start, "unterminated IRI");
  }

  // Cursor on '_'.
  bool parse_blank_label(std::string& out) {
    const std::size_t start = i;
    if (i + 1 >= s.size() || s[i + 1] != ':') return fail(start, "expected ':' after '_'");
    i += 2;
    out.clear();
    auto label_char = [](char c) {
      return is_alpha(c) || is_digit(c) || c == '_' || c == '-' || c == '.' ||
             static_cast<unsigned char>(c) >= 0x80;
    };
    while (i < s.size() && label_char(s[i])) {
      out.push_back(s[i]);
      ++i;
    }
    // A label may not end with '.'; trailing dots belong to the terminator.
    while (!out.empty() && out.back() == '.') {
      out.pop_back();
      --i;
    }
    if (out.empty()) return fail(start, "empty blank node label");
    if (out.front() == '-') return fail(start, "blank node label may not start with '-'");
    return true;
  }

  // Cursor on '"'.
  bool parse_literal(Term& out) {
    const std::size_t start = i;
    ++i;
    out.kind = TermKind::Literal;
    out.value.clear();
    out.lang.clear();
    out.datatype.clear();
    bool closed = false;
    while (i < s.size()) {
      const char c = s[i];
      if (c == '"') {
        ++i;
        closed = true;
        break;
      }
      if (c == '\\') {
        ++i;
        if (i >= s.size()) return fail(i - 1, "dangling backslash in literal");
        const char e = s[i];
        switch (e) {
          case 't': out.value.push_back('\t'); ++i; break;
          case 'b': out.value.push_back('\b'); ++i; break;
          case 'n': out.value.push_back('\n'); ++i; break;
          case 'r': out.value.push_back('\r'); ++i; break;
          case 'f': out.value.push_back('\f'); ++i; break;
          case '"': out.value.push_back('"'); ++i; break;
          case '\'': out.value.push_back('\''); ++i; break;
          case '\\': out.value.push_back('\\'); ++i; break;
          case 'u':
          case 'U':
            if (!decode_uchar(out.value)) return false;
            break;
          default:
            return fail(i - 1, std::string("unknown escape '\\") + e + "' in literal");
        }
        continue;
      }
      out.value.push_back(c);
      ++i;
    }
    if (!closed) return fail(start, "unterminated literal");

    if (i < s.size() && s[i] == '@') {
      const std::size_t tag_start = i;
      ++i;
      std::size_t run = 0;
      while (i < s.size() && is_alpha(s[i])) { ++i; ++run; }
      if (run == 0) return fail(tag_start, "empty language tag");
      while (i < s.size() && s[i] == '-') {
        ++i;
        run = 0;
        while (i < s.size() && (is_alpha(s[i]) || is_digit(s[i]))) { ++i; ++run; }
        if (run == 0) return fail(tag_start, "malformed language tag");
      }
      out.lang.assign(s.substr(tag_start + 1, i - tag_start - 1));
    } else if (i + 1 < s.size() && s[i] == '^' && s[i + 1] == '^') {
      i += 2;
      if (at_end() || s[i] != '<') return fail(i, "expected datatype IRI after '^^'");
      if (!parse_iri(out.datatype)) return false;
    }
    return true;
  }

  bool parse_subject(Term& out) {
    if (at_end()) return fail(i, "expected subject");
    const char c = s[i];
    if (c == '<') {
      out.kind = TermKind::Iri;
      out.lang.clear();
      out.datatype.clear();
      return parse_iri(out.value);
    }
    if (c == '_') {
      out.kind = TermKind::Blank;
      out.lang.clear();
      out.datatype.clear();
      return parse_blank_label(out.value);
    }
    if (c == '"') return fail(i, "literal in subject position");
    return fail(i, "expected subject");
  }

  bool parse_predicate(std::string& out) {
    if (at_end()) return fail(i, "expected predicate");
    const char c = s[i];
    if (c == '<') return parse_iri(out);
    if (c == '_') return fail(i, "blank node in predicate position");
    if (c == '"') return fail(i, "literal in predicate position");
    return fail(i, "expected predicate");
  }

  bool parse_object(Term& out) {
    if (at_end()) return fail(i, "expected object");
    const char c = s[i];
    if (c == '<') {
      out.kind = TermKind::Iri;
      out.lang.clear();
      out.datatype.clear();
      return parse_iri(out.value);
    }
    if (c == '_') {
      out.kind = TermKind::Blank;
      out.lang.clear();
      out.datatype.clear();
      return parse_blank_label(out.value);
    }
    if (c == '"') return parse_literal(out);
    return fail(i, "expected object");
  }
};

void append_escaped_iri(std::string& out, std::string_view iri) {
  out.push_back('<');
  for (const char c : iri) {
    const auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' ||
        c == '^' || c == '`' || c == '\\') {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04X", u);
      out.append(buf);
    } else {
      out.push_back(c);
    }
  }
  out.push_back('>');
}

void append_escaped_literal(std::string& out, std::string_view value) {
  out.push_back('"');
  for (const char c : value) {
    const auto u = static_cast<unsigned char>(c);
    switch (c) {
      case '"': out.append("\\\""); break;
      case '\\': out.append("\\\\"); break;
      case '\n': out.append("\\n"); break;
      case '\r': out.append("\\r"); break;
      case '\t': out.append("\\t"); break;
      default:
        if (u < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04X", u);
          out.append(buf);
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
}

}  // namespace

LineKind parse_line(std::string_view line, Triple& out, ParseIssue& issue) {
  LineParser p{line, 0, &issue};
  p.skip_ws();
  if (p.at_end()) return LineKind::Blank;
  if (line[p.i] == '#') return LineKind::Comment;

  if (!p.parse_subject(out.subject)) return LineKind::Error;
  p.skip_ws();
  if (!p.parse_predicate(out.predicate)) return LineKind::Error;
  p.skip_ws();
  if (!p.parse_object(out.object)) return LineKind::Error;
  p.skip_ws();
  if (p.at_end() || line[p.i] != '.') {
    p.fail(p.i, "missing '.' terminator");
    return LineKind::Error;
  }
  ++p.i;
  p.skip_ws();
  if (!p.at_end() && line[p.i] != '#') {
    p.fail(p.i, "unexpected content after '.'");
    return LineKind::Error;
  }
  return LineKind::Triple;
}

void append_term(std::string& out, const Term& t) {
  switch (t.kind) {
    case TermKind::Iri:
      append_escaped_iri(out, t.value);
      break;
    case TermKind::Blank:
      out.append("_:");
      out.append(t.value);
      break;
    case TermKind::Literal:
      append_escaped_literal(out, t.value);
      if (!t.lang.empty()) {
        out.push_back('@');
        out.append(t.lang);
      } else if (!t.datatype.empty()) {
        out.append("^^");
        append_escaped_iri(out, t.datatype);
      }
      break;
  }
}

std::string to_ntriples(const Triple& t) {
  std::string out;
  out.reserve(t.subject.value.size() + t.predicate.size() + t.object.value.size() + 16);
  append_term(out, t.subject);
  out.push_back(' ');
  append_escaped_iri(out, t.predicate);
  out.push_back(' ');
  append_term(out, t.object);
  out.append(" .");
  return out;
}

std::size_t MemorySource::read(char* dst, std::size_t cap) {
  const std::size_t n = std::min(cap, data_.size() - pos_);
  std::memcpy(dst, data_.data() + pos_, n);
  pos_ += n;
  return n;
}

FileSource::FileSource(const std::string& path) : path_(path) {
  file_ = std::fopen(path.c_str(), "rb");
  if (!file_) throw IoError("cannot open '" + path + "': " + std::strerror(errno));
}

FileSource::~FileSource() {
  if (file_) std::fclose(static_cast<FILE*>(file_));
}

std::size_t FileSource::read(char* dst, std::size_t cap) {
  const std::size_t n = std::fread(dst, 1, cap, static_cast<FILE*>(file_));
  if (n < cap && std::ferror(static_cast<FILE*>(file_)))
    throw IoError("read error on '" + path_ + "'");
  return n;
}

namespace {

// Replays a sniffed prefix before reading from the inner source.
class ReplaySource final : public ByteSource {
 public:
  ReplaySource(std::string prefix, std::unique_ptr<ByteSource> inner)
      : prefix_(std::move(prefix)), inner_(std::move(inner)) {}

  std::size_t read(char* dst, std::size_t cap) override {
    if (pos_ < prefix_.size()) {
      const std::size_t n = std::min(cap, prefix_.size() - pos_);
      std::memcpy(dst, prefix_.data() + pos_, n);
      pos_ += n;
      return n;
    }
    return inner_->read(dst, cap);
  }

 private:
  std::string prefix_;
  std::size_t pos_ = 0;
  std::unique_ptr<ByteSource> inner_;
};

}  // namespace

struct GzipSource::Impl {
  std::unique_ptr<ByteSource> inner;
  z_stream zs{};
  std::vector<char> in = std::vector<char>(64 * 1024);
  bool inner_eof = false;
  bool stream_end = false;

  explicit Impl(std::unique_ptr<ByteSource> src) : inner(std::move(src)) {
    // 15 + 16: gzip container only.
    if (inflateInit2(&zs, 15 + 16) != Z_OK) throw IoError("inflateInit failed");
  }
  ~Impl() { inflateEnd(&zs); }
};

GzipSource::GzipSource(std::unique_ptr<ByteSource> inner)
    : impl_(std::make_unique<Impl>(std::move(inner))) {}

GzipSource::~GzipSource() = default;

std::size_t GzipSource::read(char* dst, std::size_t cap) {
  auto& im = *impl_;
  im.zs.next_out = reinterpret_cast<Bytef*>(dst);
  im.zs.avail_out = static_cast<uInt>(cap);
  while (im.zs.avail_out > 0) {
    if (im.zs.avail_in == 0 && !im.inner_eof) {
      const std::size_t n = im.inner->read(im.in.data(), im.in.size());
      im.zs.next_in = reinterpret_cast<Bytef*>(im.in.data());
      im.zs.avail_in = static_cast<uInt>(n);
      if (n == 0) im.inner_eof = true;
    }
    if (im.stream_end) {
      if (im.zs.avail_in == 0 && im.inner_eof) break;
      // Concatenated gzip members: restart on remaining input.
      if (inflateReset(&im.zs) != Z_OK) throw IoError("gzip: inflateReset failed");
      im.stream_end = false;
    }
    if (im.zs.avail_in == 0 && im.inner_eof)
      throw IoError("gzip: truncated stream");
    const int rc = inflate(&im.zs, Z_NO_FLUSH);
    if (rc == Z_STREAM_END) {
      im.stream_end = true;
      continue;
    }
    if (rc != Z_OK && rc != Z_BUF_ERROR) {
      throw IoError(std::string("gzip: ") + (im.zs.msg ? im.zs.msg : "inflate failed"));
    }
    if (rc == Z_BUF_ERROR && im.zs.avail_in == 0 && im.inner_eof)
      throw IoError("gzip: truncated stream");
  }
  return cap - im.zs.avail_out;
}

std::unique_ptr<ByteSource> autodetect_gzip(std::unique_ptr<ByteSource> inner) {
  std::string prefix(2, '\0');
  std::size_t got = 0;
  while (got < 2) {
    const std::size_t n = inner->read(prefix.data() + got, 2 - got);
    if (n == 0) break;
    got += n;
  }
  prefix.resize(got);
  const bool gz = got == 2 && static_cast<unsigned char>(prefix[0]) == 0x1F &&
                  static_cast<unsigned char>(prefix[1]) == 0x8B;
  auto replay = std::make_unique<ReplaySource>(std::move(prefix), std::move(inner));
  if (gz) return std::make_unique<GzipSource>(std::move(replay));
  return replay;
}

std::unique_ptr<ByteSource> open_input(const std::string& path) {
  return autodetect_gzip(std::make_unique<FileSource>(path));
}

bool LineScanner::fill() {
  buf_len_ = src_->read(buf_.data(), buf_.size());
  buf_pos_ = 0;
  if (buf_len_ == 0) {
    eof_ = true;
    return false;
  }
  return true;
}

std::optional<std::string_view> LineScanner::next_line() {
  if (eof_ && buf_pos_ >= buf_len_) return std::nullopt;
  line_.clear();
  for (;;) {
    if (buf_pos_ >= buf_len_) {
      if (eof_ || !fill()) {
        if (line_.empty()) return std::nullopt;
        break;  // final line without newline
      }
    }
    const char* begin = buf_.data() + buf_pos_;
    const char* nl = static_cast<const char*>(std::memchr(begin, '\n', buf_len_ - buf_pos_));
    if (nl) {
      line_.append(begin, static_cast<std::size_t>(nl - begin));
      buf_pos_ = static_cast<std::size_t>(nl - buf_.data()) + 1;
      break;
    }
    line_.append(begin, buf_len_ - buf_pos_);
    buf_pos_ = buf_len_;
  }
  if (!line_.empty() && line_.back() == '\r') line_.pop_back();
  peak_capacity_ = std::max(peak_capacity_, line_.capacity());
  return std::string_view(line_);
}

std::optional<Triple> TripleStream::next() {
  while (auto line = scanner_.next_line()) {
    ++report_.lines_total;
    switch (parse_line(*line, triple_, issue_)) {
      case LineKind::Triple:
        ++report_.triples_emitted;
        return triple_;
      case LineKind::Comment:
      case LineKind::Blank:
        ++report_.lines_ignored;
        break;
      case LineKind::Error: {
        if (!report_.first_error)
          report_.first_error = FirstError{report_.lines_total, issue_.message};
        if (policy_ == ParsePolicy::Strict)
          throw SyntaxError(report_.lines_total, issue_.message);
        ++report_.lines_skipped;
        break;
      }
    }
  }
  return std::nullopt;
}

ParseReport parse_blocks(ByteSource& src, ParsePolicy policy,
                         const std::function<void(std::span<const Triple>)>& sink,
                         std::size_t block_bytes) {
  ParseReport report;
  std::string block;
  std::string carry;
  std::vector<char> io(std::min<std::size_t>(block_bytes, 1 << 20));
  bool eof = false;

  std::vector<std::string_view> lines;
  std::vector<LineKind> kinds;
  std::vector<Triple> parsed;
  std::vector<ParseIssue> issues;
  std::vector<Triple> out;

  while (!eof || !carry.empty()) {
    block.clear();
    block.swap(carry);
    while (block.size() < block_bytes && !eof) {
      const std::size_t n = src.read(io.data(), io.size());
      if (n == 0) {
        eof = true;
        break;
      }
      block.append(io.data(), n);
    }
    if (!eof) {
      // Cut at the last newline; the partial tail moves to the next block.
      const std::size_t cut = block.rfind('\n');
      if (cut == std::string::npos) {
        // One line longer than the block: keep extending.
        carry.swap(block);
        std::size_t n;
        do {
          n = src.read(io.data(), io.size());
          if (n == 0) { eof = true; break; }
          const char* nl = static_cast<const char*>(std::memchr(io.data(), '\n', n));
          if (nl) {
            const std::size_t keep = static_cast<std::size_t>(nl - io.data()) + 1;
            carry.append(io.data(), keep);
            block.assign(io.data() + keep, n - keep);
            carry.swap(block);
            // carry now holds the remainder, block the completed lines
            break;
          }
          carry.append(io.data(), n);
        } while (true);
        if (eof) {
          block.swap(carry);
        } else if (block.empty()) {
          continue;
        }
      } else {
        carry.assign(block, cut + 1, block.size() - cut - 1);
        block.resize(cut + 1);
      }
    }
    if (block.empty()) continue;

    lines.clear();
    std::string_view rest(block);
    while (!rest.empty()) {
      const std::size_t nl = rest.find('\n');
      std::string_view line = nl == std::string_view::npos ? rest : rest.substr(0, nl);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      if (nl == std::string_view::npos) break;
      rest.remove_prefix(nl + 1);
    }

    const std::size_t nlines = lines.size();
    kinds.assign(nlines, LineKind::Blank);
    parsed.assign(nlines, Triple{});
    issues.assign(nlines, ParseIssue{});
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long k = 0; k < static_cast<long long>(nlines); ++k) {
      const auto idx = static_cast<std::size_t>(k);
      kinds[idx] = parse_line(lines[idx], parsed[idx], issues[idx]);
    }

    out.clear();
    for (std::size_t k = 0; k < nlines; ++k) {
      ++report.lines_total;
      switch (kinds[k]) {
        case LineKind::Triple:
          ++report.triples_emitted;
          out.push_back(std::move(parsed[k]));
          break;
        case LineKind::Comment:
        case LineKind::Blank:
          ++report.lines_ignored;
          break;
        case LineKind::Error:
          if (!report.first_error)
            report.first_error = FirstError{report.lines_total, issues[k].message};
          if (policy == ParsePolicy::Strict) {
            if (!out.empty()) sink(out);
            throw SyntaxError(report.lines_total, issues[k].message);
          }
          ++report.lines_skipped;
          break;
      }
    }
    if (!out.empty()) sink(out);
  }
  return report;
}

}  // namespace tropescope::ntriples
