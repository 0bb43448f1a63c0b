#include "tropescope/dataset.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "tropescope/ntriples.hpp"

namespace tropescope::dataset {

namespace {

using nlohmann::json;

std::size_t sum_degrees(const std::map<std::string, std::vector<std::string>>& index) {
  std::size_t n = 0;
  for (const auto& [_, list] : index) n += list.size();
  return n;
}

}  // namespace

std::size_t FilmTropeDataset::edge_count() const { return sum_degrees(films); }
std::size_t ReverseIndex::edge_count() const { return sum_degrees(tropes); }

std::string save_dataset_string(const FilmTropeDataset& d) {
  json j;
  j["version"] = 1;
  j["films"] = json::object();
  for (const auto& [film, tropes] : d.films) j["films"][film] = tropes;
  // Sorted keys come from the underlying std::map; replace keeps invalid
  // UTF-8 from breaking serialization deterministically.
  return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

std::size_t save_dataset(const FilmTropeDataset& d, std::ostream& out) {
  const std::string text = save_dataset_string(d);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw ntriples::IoError("write failed while saving dataset");
  return text.size();
}

void save_dataset_file(const FilmTropeDataset& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ntriples::IoError("cannot open '" + path + "' for writing");
  save_dataset(d, out);
  out.flush();
  if (!out) throw ntriples::IoError("write failed on '" + path + "'");
}

FilmTropeDataset load_dataset_string(std::string_view text) {
  // nlohmann keeps the last value for repeated keys, so duplicates are caught
  // with a parser callback.
  std::vector<std::set<std::string>> seen;
  auto cb = [&seen](int depth, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::object_start) {
      seen.resize(static_cast<std::size_t>(depth) + 1);
      seen[static_cast<std::size_t>(depth)].clear();
    } else if (event == json::parse_event_t::key) {
      const auto key = parsed.get<std::string>();
      if (!seen[static_cast<std::size_t>(depth) - 1].insert(key).second)
        throw DatasetFormatError("duplicate film key '" + key + "'");
    }
    return true;
  };

  json j;
  try {
    j = json::parse(text, cb);
  } catch (const DatasetFormatError&) {
    throw;
  } catch (const json::parse_error& e) {
    throw DatasetFormatError(std::string("malformed dataset JSON: ") + e.what());
  }

  if (!j.is_object()) throw DatasetFormatError("dataset must be a JSON object");
  if (!j.contains("version")) throw DatasetFormatError("missing version field");
  if (!j["version"].is_number_integer() || j["version"].get<int>() != 1)
    throw DatasetFormatError("unsupported dataset version (expected 1)");
  if (!j.contains("films")) throw DatasetFormatError("missing films object");
  for (const auto& [key, _] : j.items()) {
    if (key != "version" && key != "films")
      throw DatasetFormatError("unknown dataset key '" + key + "'");
  }
  const auto& films = j["films"];
  if (!films.is_object()) throw DatasetFormatError("films must be a JSON object");

  FilmTropeDataset d;
  for (const auto& [film, tropes] : films.items()) {
    if (film.empty()) throw DatasetFormatError("empty film name");
    if (!tropes.is_array())
      throw DatasetFormatError("film '" + film + "' must map to an array");
    std::vector<std::string> list;
    list.reserve(tropes.size());
    for (const auto& e : tropes) {
      if (!e.is_string())
        throw DatasetFormatError("non-string trope entry under film '" + film + "'");
      auto name = e.get<std::string>();
      if (name.empty()) throw DatasetFormatError("empty trope name under film '" + film + "'");
      list.push_back(std::move(name));
    }
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    if (list.empty()) continue;  // films without tropes are not retained
    d.films.emplace(film, std::move(list));
  }

  check_consistency(d, reverse_index(d));
  return d;
}

FilmTropeDataset load_dataset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ntriples::IoError("cannot open dataset '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw ntriples::IoError("read error on dataset '" + path + "'");
  return load_dataset_string(ss.str());
}

ReverseIndex reverse_index(const FilmTropeDataset& d) {
  ReverseIndex r;
  // Film keys arrive in ascending order, so each trope's film list is built
  // already sorted and unique.
  for (const auto& [film, tropes] : d.films) {
    for (const auto& trope : tropes) r.tropes[trope].push_back(film);
  }
  check_consistency(d, r);
  return r;
}

void check_consistency(const FilmTropeDataset& d, const ReverseIndex& r) {
  const std::size_t forward = d.edge_count();
  const std::size_t backward = r.edge_count();
  if (forward != backward)
    throw std::logic_error("bipartite edge mismatch: " + std::to_string(forward) +
                           " film-side vs " + std::to_string(backward) + " trope-side");
}

}  // namespace tropescope::dataset
