#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "tropescope/dataset.hpp"
#include "tropescope/ntriples.hpp"

namespace tropescope::extraction {

enum class NameRule { LastPathSegment };

enum class ResourceClass { Film, Trope, Other };

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class NameError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExtractionConfig {
  std::vector<std::string> film_iri_prefixes;
  std::vector<std::string> trope_iri_prefixes;
  std::vector<std::string> link_predicates;
  NameRule name_rule = NameRule::LastPathSegment;
};

// Layout of the July 2016 DBTropes dump; override with a config file for
// other dumps.
ExtractionConfig default_config();

// JSON object with keys film_iri_prefixes, trope_iri_prefixes,
// link_predicates, name_rule. Unknown keys are rejected.
ExtractionConfig load_config_string(std::string_view text);
ExtractionConfig load_config_file(const std::string& path);
std::string config_to_json(const ExtractionConfig& cfg);

// Non-empty lists, well-formed prefixes, film/trope prefix sets disjoint
// (neither side a prefix of the other). Throws ConfigError.
void validate_config(const ExtractionConfig& cfg);

ResourceClass classify_resource(std::string_view iri, const ExtractionConfig& cfg);

// Default rule: substring after the final '/', percent-decoded. Throws
// NameError when the final segment is empty or there is no path separator.
std::string short_name(std::string_view iri, NameRule rule);

struct ExtractStats {
  std::size_t link_triples = 0;  // triples matching predicate + film subject + trope object
  std::size_t name_errors = 0;   // edges dropped because a short name could not be derived
  std::size_t films_dropped = 0; // films whose every edge failed name derivation
};

// Accumulates film-trope edges; duplicates collapse. The result is a pure
// function of the triple multiset.
class DatasetBuilder {
 public:
  explicit DatasetBuilder(const ExtractionConfig& cfg);

  void add(const ntriples::Triple& t);
  dataset::FilmTropeDataset finish();
  const ExtractStats& stats() const { return stats_; }

 private:
  const ExtractionConfig* cfg_;
  std::unordered_set<std::string_view> link_predicates_;
  std::map<std::string, std::set<std::string>> edges_;
  ExtractStats stats_;
};

dataset::FilmTropeDataset extract_dataset(ntriples::TripleStream& triples,
                                          const ExtractionConfig& cfg,
                                          ExtractStats* stats = nullptr);

// Block-parallel parse feeding the same accumulator; produces a dataset
// identical to the streaming path.
dataset::FilmTropeDataset extract_dataset_parallel(ntriples::ByteSource& src,
                                                   ntriples::ParsePolicy policy,
                                                   const ExtractionConfig& cfg,
                                                   ntriples::ParseReport* report = nullptr,
                                                   ExtractStats* stats = nullptr);

}  // namespace tropescope::extraction
