#pragma once

#include <cstddef>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tropescope::dataset {

// Bipartite film -> trope mapping. Trope lists are sorted ascending (byte-wise)
// and duplicate-free; no empty names; no film with an empty list is retained.
struct FilmTropeDataset {
  std::map<std::string, std::vector<std::string>> films;

  std::size_t edge_count() const;
  bool operator==(const FilmTropeDataset&) const = default;
};

// Transpose of the forward mapping: trope -> sorted unique list of films.
struct ReverseIndex {
  std::map<std::string, std::vector<std::string>> tropes;

  std::size_t edge_count() const;
};

class DatasetFormatError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Canonical form: keys sorted byte-wise, 2-space indentation, LF newlines,
// UTF-8 without BOM, trailing newline. Equal datasets produce identical bytes.
std::string save_dataset_string(const FilmTropeDataset& d);
std::size_t save_dataset(const FilmTropeDataset& d, std::ostream& out);
void save_dataset_file(const FilmTropeDataset& d, const std::string& path);

// Accepts any semantically equivalent JSON (lists are re-sorted and deduped).
// Throws DatasetFormatError on malformed JSON, wrong version, duplicate film
// keys, non-string entries or empty names.
FilmTropeDataset load_dataset_string(std::string_view text);
FilmTropeDataset load_dataset_file(const std::string& path);

ReverseIndex reverse_index(const FilmTropeDataset& d);

// Sum of film degrees == sum of trope degrees == edge count. Throws
// std::logic_error if violated.
void check_consistency(const FilmTropeDataset& d, const ReverseIndex& r);

}  // namespace tropescope::dataset
