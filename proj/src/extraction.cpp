#include "tropescope/extraction.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace tropescope::extraction {

namespace {

using nlohmann::json;

bool is_hex(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

unsigned hex_val(char c) {
  if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
  if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
  return static_cast<unsigned>(c - 'A' + 10);
}

std::string percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && is_hex(s[i + 1]) && is_hex(s[i + 2])) {
      out.push_back(static_cast<char>((hex_val(s[i + 1]) << 4) | hex_val(s[i + 2])));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

std::string_view name_rule_str(NameRule rule) {
  switch (rule) {
    case NameRule::LastPathSegment: return "last_path_segment";
  }
  return "last_path_segment";
}

NameRule name_rule_from_str(std::string_view s) {
  if (s == "last_path_segment") return NameRule::LastPathSegment;
  throw ConfigError("unknown name_rule '" + std::string(s) + "'");
}

bool plausible_prefix(std::string_view p) {
  if (p.empty()) return false;
  for (const char c : p) {
    const auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' ||
        c == '^' || c == '`' || c == '\\')
      return false;
  }
  return true;
}

std::vector<std::string> string_list(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_array()) throw ConfigError(std::string(key) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw ConfigError(std::string(key) + " must contain only strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

ExtractionConfig default_config() {
  ExtractionConfig cfg;
  cfg.film_iri_prefixes = {"http://dbtropes.org/resource/Film/"};
  cfg.trope_iri_prefixes = {"http://dbtropes.org/resource/Main/"};
  cfg.link_predicates = {
      "http://skipforward.net/skipforward/resource/seeder/skipinions/hasFeature"};
  cfg.name_rule = NameRule::LastPathSegment;
  return cfg;
}

void validate_config(const ExtractionConfig& cfg) {
  if (cfg.film_iri_prefixes.empty()) throw ConfigError("film_iri_prefixes must be non-empty");
  if (cfg.trope_iri_prefixes.empty()) throw ConfigError("trope_iri_prefixes must be non-empty");
  if (cfg.link_predicates.empty()) throw ConfigError("link_predicates must be non-empty");
  for (const auto& p : cfg.film_iri_prefixes)
    if (!plausible_prefix(p)) throw ConfigError("malformed film IRI prefix '" + p + "'");
  for (const auto& p : cfg.trope_iri_prefixes)
    if (!plausible_prefix(p)) throw ConfigError("malformed trope IRI prefix '" + p + "'");
  for (const auto& p : cfg.link_predicates)
    if (!plausible_prefix(p)) throw ConfigError("malformed link predicate '" + p + "'");
  for (const auto& f : cfg.film_iri_prefixes) {
    for (const auto& t : cfg.trope_iri_prefixes) {
      if (f.starts_with(t) || t.starts_with(f))
        throw ConfigError("film and trope prefixes overlap: '" + f + "' vs '" + t + "'");
    }
  }
}

ExtractionConfig load_config_string(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {"film_iri_prefixes", "trope_iri_prefixes",
                                              "link_predicates", "name_rule"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  ExtractionConfig cfg;
  try {
    cfg.film_iri_prefixes = string_list(j, "film_iri_prefixes");
    cfg.trope_iri_prefixes = string_list(j, "trope_iri_prefixes");
    cfg.link_predicates = string_list(j, "link_predicates");
  } catch (const json::out_of_range&) {
    throw ConfigError("config requires film_iri_prefixes, trope_iri_prefixes, link_predicates");
  }
  if (j.contains("name_rule")) {
    if (!j["name_rule"].is_string()) throw ConfigError("name_rule must be a string");
    cfg.name_rule = name_rule_from_str(j["name_rule"].get<std::string>());
  }
  validate_config(cfg);
  return cfg;
}

ExtractionConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ntriples::IoError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw ntriples::IoError("read error on config '" + path + "'");
  return load_config_string(ss.str());
}

std::string config_to_json(const ExtractionConfig& cfg) {
  json j;
  j["film_iri_prefixes"] = cfg.film_iri_prefixes;
  j["trope_iri_prefixes"] = cfg.trope_iri_prefixes;
  j["link_predicates"] = cfg.link_predicates;
  j["name_rule"] = name_rule_str(cfg.name_rule);
  return j.dump(2) + "\n";
}

ResourceClass classify_resource(std::string_view iri, const ExtractionConfig& cfg) {
  for (const auto& p : cfg.film_iri_prefixes)
    if (iri.starts_with(p)) return ResourceClass::Film;
  for (const auto& p : cfg.trope_iri_prefixes)
    if (iri.starts_with(p)) return ResourceClass::Trope;
  return ResourceClass::Other;
}

std::string short_name(std::string_view iri, NameRule rule) {
  switch (rule) {
    case NameRule::LastPathSegment: {
      const std::size_t slash = iri.rfind('/');
      if (slash == std::string_view::npos)
        throw NameError("IRI has no path separator: '" + std::string(iri) + "'");
      const std::string_view segment = iri.substr(slash + 1);
      if (segment.empty())
        throw NameError("empty final path segment in '" + std::string(iri) + "'");
      std::string decoded = percent_decode(segment);
      if (decoded.empty())
        throw NameError("name decodes to empty string in '" + std::string(iri) + "'");
      return decoded;
    }
  }
  throw NameError("unsupported name rule");
}

DatasetBuilder::DatasetBuilder(const ExtractionConfig& cfg) : cfg_(&cfg) {
  validate_config(cfg);
  for (const auto& p : cfg.link_predicates) link_predicates_.insert(p);
}

void DatasetBuilder::add(const ntriples::Triple& t) {
  if (!link_predicates_.count(t.predicate)) return;
  if (t.subject.kind != ntriples::TermKind::Iri || t.object.kind != ntriples::TermKind::Iri)
    return;
  if (classify_resource(t.subject.value, *cfg_) != ResourceClass::Film) return;
  if (classify_resource(t.object.value, *cfg_) != ResourceClass::Trope) return;
  ++stats_.link_triples;

  std::string film;
  try {
    film = short_name(t.subject.value, cfg_->name_rule);
  } catch (const NameError&) {
    ++stats_.name_errors;
    return;
  }
  std::string trope;
  try {
    trope = short_name(t.object.value, cfg_->name_rule);
  } catch (const NameError&) {
    ++stats_.name_errors;
    // Keep the film keyed so a film whose every edge fails is counted once.
    edges_[std::move(film)];
    return;
  }
  edges_[std::move(film)].insert(std::move(trope));
}

dataset::FilmTropeDataset DatasetBuilder::finish() {
  dataset::FilmTropeDataset d;
  for (auto& [film, tropes] : edges_) {
    if (tropes.empty()) {
      ++stats_.films_dropped;
      continue;
    }
    d.films.emplace(film, std::vector<std::string>(tropes.begin(), tropes.end()));
  }
  edges_.clear();
  return d;
}

dataset::FilmTropeDataset extract_dataset(ntriples::TripleStream& triples,
                                          const ExtractionConfig& cfg, ExtractStats* stats) {
  DatasetBuilder builder(cfg);
  while (auto t = triples.next()) builder.add(*t);
  auto d = builder.finish();
  if (stats) *stats = builder.stats();
  return d;
}

dataset::FilmTropeDataset extract_dataset_parallel(ntriples::ByteSource& src,
                                                   ntriples::ParsePolicy policy,
                                                   const ExtractionConfig& cfg,
                                                   ntriples::ParseReport* report,
                                                   ExtractStats* stats) {
  DatasetBuilder builder(cfg);
  auto rep = ntriples::parse_blocks(src, policy, [&](std::span<const ntriples::Triple> batch) {
    for (const auto& t : batch) builder.add(t);
  });
  auto d = builder.finish();
  if (report) *report = rep;
  if (stats) *stats = builder.stats();
  return d;
}

}  // namespace tropescope::extraction
