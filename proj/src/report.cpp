#include "tropescope/report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tropescope/ntriples.hpp"
#include "tropescope/svg.hpp"

namespace tropescope::report {

namespace {

using nlohmann::json;

std::string strf(const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

json ranking_json(const std::vector<RankingEntry>& top) {
  json arr = json::array();
  for (const auto& e : top)
    arr.push_back({{"position", e.position}, {"name", e.name}, {"count", e.count}});
  return arr;
}

json stats_json(const stats::StatsSummary& s) {
  return json::parse(stats::to_json(s));
}

json fits_json(const AxisInputs& axis) {
  json arr = json::array();
  for (const auto& f : axis.fits) arr.push_back(json::parse(fitting::to_json(f)));
  return arr;
}

void append_stats_table(std::string& md, const AxisInputs& axis) {
  const auto& s = axis.stats;
  md += "| statistic | value |\n|---|---|\n";
  md += strf("| n | %zu |\n", s.n);
  md += strf("| minimum | %.0f |\n", s.minimum);
  md += strf("| maximum | %.0f |\n", s.maximum);
  md += strf("| mean | %.3f |\n", s.mean);
  md += strf("| median | %.1f |\n", s.median);
  md += strf("| q1 | %.1f |\n", s.q1);
  md += strf("| q2 | %.1f |\n", s.median);
  md += strf("| q3 | %.1f |\n", s.q3);
  md += strf("| variance | %.3f |\n", s.variance);
  md += s.skewness ? strf("| skewness | %.3f |\n", *s.skewness)
                   : std::string("| skewness | undefined |\n");
  md += s.kurtosis ? strf("| kurtosis | %.3f |\n", *s.kurtosis)
                   : std::string("| kurtosis | undefined |\n");
}

void append_fits_table(std::string& md, const AxisInputs& axis) {
  if (axis.fits.empty()) {
    md += "No distribution fits available.\n";
    return;
  }
  md += "| rank | family | location | shape | scale | nll | ks | aic | converged |\n";
  md += "|---|---|---|---|---|---|---|---|---|\n";
  std::size_t rank = 1;
  for (const auto& f : axis.fits) {
    md += strf("| %zu | %s | %.6g | %.6g | %.6g | %.6g | %.6g | %.6g | %s |\n", rank++,
               std::string(fitting::family_name(f.family)).c_str(), f.params.location,
               f.params.shape, f.params.scale, f.nll, f.ks, f.aic, f.converged ? "yes" : "no");
  }
  for (const auto& fail : axis.fit_failures) {
    md += strf("\n_%s fit failed: %s_\n", std::string(fitting::family_name(fail.family)).c_str(),
               fail.reason.c_str());
  }
}

void append_ranking_table(std::string& md, const std::vector<RankingEntry>& top,
                          const char* entity, const char* metric) {
  md += strf("| position | %s | %s |\n|---|---|---|\n", entity, metric);
  for (const auto& e : top) md += strf("| %zu | %s | %zu |\n", e.position, e.name.c_str(), e.count);
}

}  // namespace

std::vector<double> degree_sequence(
    const std::map<std::string, std::vector<std::string>>& index) {
  std::vector<double> out;
  out.reserve(index.size());
  for (const auto& [_, list] : index) out.push_back(static_cast<double>(list.size()));
  return out;
}

std::vector<RankingEntry> top_k(const std::map<std::string, std::vector<std::string>>& index,
                                std::size_t k) {
  if (k < 1) throw ReportError("top_k requires k >= 1");
  std::vector<RankingEntry> entries;
  entries.reserve(index.size());
  for (const auto& [name, list] : index) entries.push_back({0, name, list.size()});
  const std::size_t take = std::min(k, entries.size());
  std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(take),
                    entries.end(), [](const RankingEntry& a, const RankingEntry& b) {
                      if (a.count != b.count) return a.count > b.count;
                      return a.name < b.name;
                    });
  entries.resize(take);
  for (std::size_t i = 0; i < entries.size(); ++i) entries[i].position = i + 1;
  return entries;
}

double spread_percent(std::span<const RankingEntry> ranking) {
  if (ranking.empty()) throw ReportError("spread_percent of empty ranking");
  const double top = static_cast<double>(ranking.front().count);
  const double bottom = static_cast<double>(ranking.back().count);
  if (top == 0) return 0.0;
  return 100.0 * (top - bottom) / top;
}

double coverage_percent(std::string_view trope, const dataset::ReverseIndex& reverse,
                        std::size_t n_films) {
  const auto it = reverse.tropes.find(std::string(trope));
  if (it == reverse.tropes.end())
    throw ReportError("unknown trope '" + std::string(trope) + "'");
  if (n_films == 0) throw ReportError("coverage_percent with zero films");
  return 100.0 * static_cast<double>(it->second.size()) / static_cast<double>(n_films);
}

std::vector<HistBin> histogram(std::span<const double> values, std::size_t forced_width) {
  if (values.empty()) throw ReportError("histogram of empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = std::floor(sorted.front());
  const double hi = sorted.back();

  std::size_t width = forced_width;
  if (width == 0) {
    const double iqr = stats::quantile_sorted(sorted, 0.75) - stats::quantile_sorted(sorted, 0.25);
    const double fd = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
    width = fd > 0 ? static_cast<std::size_t>(std::ceil(fd)) : 0;
    if (width < 1) width = 1;
  }

  const double w = static_cast<double>(width);
  const auto nbins = static_cast<std::size_t>(std::floor((hi - lo) / w)) + 1;
  std::vector<HistBin> bins(nbins);
  for (std::size_t i = 0; i < nbins; ++i)
    bins[i] = {lo + static_cast<double>(i) * w, w, 0};
  for (const double v : sorted) {
    auto idx = static_cast<std::size_t>((v - lo) / w);
    if (idx >= nbins) idx = nbins - 1;
    ++bins[idx].count;
  }
  return bins;
}

ReportInputs analyze(const dataset::FilmTropeDataset& d, std::size_t top,
                     std::span<const fitting::Family> families, const fitting::FitOptions& opts) {
  const auto reverse = dataset::reverse_index(d);

  ReportInputs in;
  in.n_films = d.films.size();
  in.n_tropes = reverse.tropes.size();
  in.edges = d.edge_count();

  auto fill = [&](AxisInputs& axis, const std::map<std::string, std::vector<std::string>>& index,
                  const char* label) {
    axis.axis_label = label;
    axis.n = index.size();
    const auto degrees = degree_sequence(index);
    axis.stats = stats::summarize(degrees);
    axis.hist = histogram(degrees);
    axis.top = top_k(index, top);
    if (!families.empty() && degrees.size() >= 10 && axis.stats.minimum != axis.stats.maximum) {
      auto sel = fitting::select_best(families, degrees, opts);
      axis.fits = std::move(sel.ranked);
      axis.fit_failures = std::move(sel.failures);
    }
  };
  fill(in.film_axis, d.films, "Tropes per film");
  fill(in.trope_axis, reverse.tropes, "Films per trope");
  return in;
}

ReportBundle render_report(const ReportInputs& in) {
  ReportBundle bundle;

  const double film_spread = in.film_axis.top.empty() ? 0.0 : spread_percent(in.film_axis.top);
  const double trope_spread = in.trope_axis.top.empty() ? 0.0 : spread_percent(in.trope_axis.top);
  const bool has_top_trope = !in.trope_axis.top.empty() && in.n_films > 0;
  const std::string top_trope = has_top_trope ? in.trope_axis.top.front().name : "";
  const double top_trope_coverage =
      has_top_trope ? 100.0 * static_cast<double>(in.trope_axis.top.front().count) /
                          static_cast<double>(in.n_films)
                    : 0.0;

  std::string& md = bundle.markdown;
  md += "# Film-trope dataset report\n\n";
  md += "## Dataset\n\n";
  md += "| quantity | value |\n|---|---|\n";
  md += strf("| films | %zu |\n", in.n_films);
  md += strf("| tropes | %zu |\n", in.n_tropes);
  md += strf("| film-trope links | %zu |\n\n", in.edges);

  auto axis_section = [&](const AxisInputs& axis, const char* entity, const char* metric,
                          const char* figure) {
    md += strf("## %s\n\n", axis.axis_label.c_str());
    md += "### Descriptive statistics\n\n";
    append_stats_table(md, axis);
    md += "\n### Fitted distributions\n\n";
    append_fits_table(md, axis);
    md += strf("\n### Top-%zu %ss by %s\n\n", axis.top.size(), entity, metric);
    append_ranking_table(md, axis.top, entity, metric);
    md += strf("\n![%s](%s)\n\n", axis.axis_label.c_str(), figure);
  };
  axis_section(in.film_axis, "film", "trope count", "film_axis.svg");
  axis_section(in.trope_axis, "trope", "film count", "trope_axis.svg");

  md += "## Derived metrics\n\n";
  md += strf("- Spread of the film ranking (top vs bottom): %.3f %%\n", film_spread);
  md += strf("- Spread of the trope ranking (top vs bottom): %.3f %%\n", trope_spread);
  if (has_top_trope) {
    md += strf("- Most common trope %s appears in %.3f %% of films\n", top_trope.c_str(),
               top_trope_coverage);
  }

  json summary;
  summary["dataset"] = {{"films", in.n_films}, {"tropes", in.n_tropes}, {"edges", in.edges}};
  auto axis_json = [&](const AxisInputs& axis) {
    json j;
    j["label"] = axis.axis_label;
    j["n"] = axis.n;
    j["stats"] = stats_json(axis.stats);
    j["fits"] = fits_json(axis);
    j["top"] = ranking_json(axis.top);
    return j;
  };
  summary["film_axis"] = axis_json(in.film_axis);
  summary["trope_axis"] = axis_json(in.trope_axis);
  summary["derived"] = {{"film_spread_percent", film_spread},
                        {"trope_spread_percent", trope_spread}};
  if (has_top_trope) {
    summary["derived"]["top_trope"] = top_trope;
    summary["derived"]["top_trope_coverage_percent"] = top_trope_coverage;
  }
  bundle.summary_json = summary.dump(2, ' ', false, json::error_handler_t::replace) + "\n";

  const fitting::FitResult* film_fit = in.film_axis.fits.empty() ? nullptr : &in.film_axis.fits[0];
  const fitting::FitResult* trope_fit =
      in.trope_axis.fits.empty() ? nullptr : &in.trope_axis.fits[0];
  if (!in.film_axis.hist.empty())
    bundle.film_svg = svg::distribution_figure(in.film_axis.hist, in.film_axis.stats.n, film_fit,
                                               "tropes per film");
  if (!in.trope_axis.hist.empty())
    bundle.trope_svg = svg::distribution_figure(in.trope_axis.hist, in.trope_axis.stats.n,
                                                trope_fit, "films per trope");
  return bundle;
}

void write_bundle(const ReportBundle& bundle, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ntriples::IoError("cannot create directory '" + dir + "': " + ec.message());

  auto write = [&](const std::string& name, const std::string& content) {
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ntriples::IoError("cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw ntriples::IoError("write failed on '" + path.string() + "'");
  };
  write("report.md", bundle.markdown);
  write("summary.json", bundle.summary_json);
  write("film_axis.svg", bundle.film_svg);
  write("trope_axis.svg", bundle.trope_svg);
}

}  // namespace tropescope::report
