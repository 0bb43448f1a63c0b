#include "tropescope/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tropescope/dataset.hpp"
#include "tropescope/extraction.hpp"
#include "tropescope/fitting.hpp"
#include "tropescope/ntriples.hpp"
#include "tropescope/report.hpp"
#include "tropescope/stats.hpp"

namespace tropescope::cli {

namespace {

constexpr int kOk = 0;
constexpr int kUsageError = 1;
constexpr int kInputError = 2;
constexpr int kIoError = 3;

struct Options {
  std::string input;
  std::string dataset;
  std::string config;
  std::string axis = "both";
  std::string families = "loglogistic,foldcauchy,lognormal,exponential";
  std::size_t top = 25;
  std::string output;
  std::string outdir = "report";
  std::string policy = "lenient";
  std::uint64_t seed = 1;
  // synth
  std::string family = "loglogistic";
  std::size_t n = 1000;
  double location = 0.0;
  double shape = 1.0;
  double scale = 1.0;
  bool json = false;
};

ntriples::ParsePolicy parse_policy(const std::string& s) {
  return s == "strict" ? ntriples::ParsePolicy::Strict : ntriples::ParsePolicy::Lenient;
}

std::vector<fitting::Family> parse_families(const std::string& csv) {
  std::vector<fitting::Family> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto f = fitting::family_from_name(item);
    if (!f) throw CLI::ValidationError("--families", "unknown family '" + item + "'");
    out.push_back(*f);
  }
  if (out.empty()) throw CLI::ValidationError("--families", "no families given");
  return out;
}

extraction::ExtractionConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return extraction::default_config();
  return extraction::load_config_file(path);
}

struct Axes {
  bool films = false;
  bool tropes = false;
};

Axes parse_axis(const std::string& axis) {
  if (axis == "films") return {true, false};
  if (axis == "tropes") return {false, true};
  return {true, true};
}

void print_stats_text(std::ostream& out, const std::string& title,
                      const stats::StatsSummary& s) {
  out << title << "\n";
  char buf[64];
  auto row = [&](const char* name, const std::string& value) {
    std::snprintf(buf, sizeof buf, "  %-9s %s\n", name, value.c_str());
    out << buf;
  };
  auto num = [&](double v, const char* fmt = "%.6g") {
    char b[64];
    std::snprintf(b, sizeof b, fmt, v);
    return std::string(b);
  };
  row("n", std::to_string(s.n));
  row("minimum", num(s.minimum, "%.0f"));
  row("maximum", num(s.maximum, "%.0f"));
  row("mean", num(s.mean));
  row("median", num(s.median));
  row("q1", num(s.q1));
  row("q3", num(s.q3));
  row("variance", num(s.variance));
  row("skewness", s.skewness ? num(*s.skewness) : "undefined");
  row("kurtosis", s.kurtosis ? num(*s.kurtosis) : "undefined");
}

int cmd_extract(const Options& opt, std::ostream& out) {
  const auto cfg = load_config_or_default(opt.config);
  auto src = ntriples::open_input(opt.input);

  ntriples::ParseReport report;
  extraction::ExtractStats stats;
  const auto d = extraction::extract_dataset_parallel(*src, parse_policy(opt.policy), cfg,
                                                      &report, &stats);
  const auto reverse = dataset::reverse_index(d);
  dataset::save_dataset_file(d, opt.output);

  out << "lines         " << report.lines_total << "\n";
  out << "triples       " << report.triples_emitted << "\n";
  out << "skipped       " << report.lines_skipped << "\n";
  out << "ignored       " << report.lines_ignored << "\n";
  if (report.first_error) {
    out << "first error   line " << report.first_error->line << ": "
        << report.first_error->message << "\n";
  }
  out << "link triples  " << stats.link_triples << "\n";
  out << "name errors   " << stats.name_errors << "\n";
  out << "films dropped " << stats.films_dropped << "\n";
  out << "films         " << d.films.size() << "\n";
  out << "tropes        " << reverse.tropes.size() << "\n";
  out << "edges         " << d.edge_count() << "\n";
  out << "dataset written to " << opt.output << "\n";
  return kOk;
}

int cmd_stats(const Options& opt, std::ostream& out) {
  const auto d = dataset::load_dataset_file(opt.dataset);
  const auto axes = parse_axis(opt.axis);
  nlohmann::json j;
  if (axes.films) {
    const auto s = stats::summarize(report::degree_sequence(d.films));
    if (opt.json)
      j["films"] = nlohmann::json::parse(stats::to_json(s));
    else
      print_stats_text(out, "Tropes per film", s);
  }
  if (axes.tropes) {
    const auto reverse = dataset::reverse_index(d);
    const auto s = stats::summarize(report::degree_sequence(reverse.tropes));
    if (opt.json)
      j["tropes"] = nlohmann::json::parse(stats::to_json(s));
    else
      print_stats_text(out, "Films per trope", s);
  }
  if (opt.json) out << j.dump(2) << "\n";
  return kOk;
}

int cmd_fit(const Options& opt, std::ostream& out) {
  const auto d = dataset::load_dataset_file(opt.dataset);
  const auto axes = parse_axis(opt.axis);
  const auto families = parse_families(opt.families);

  auto run_axis = [&](const std::map<std::string, std::vector<std::string>>& index,
                      const char* title, nlohmann::json* jout) {
    const auto degrees = report::degree_sequence(index);
    const auto sel = fitting::select_best(families, degrees);
    if (jout) {
      auto arr = nlohmann::json::array();
      for (const auto& r : sel.ranked) arr.push_back(nlohmann::json::parse(fitting::to_json(r)));
      (*jout) = std::move(arr);
      return;
    }
    out << title << "\n";
    std::size_t rank = 1;
    for (const auto& r : sel.ranked) {
      char buf[256];
      std::snprintf(buf, sizeof buf,
                    "  %zu. %-12s location=%-10.6g shape=%-10.6g scale=%-10.6g ks=%-10.6g "
                    "aic=%-12.6g %s\n",
                    rank++, std::string(fitting::family_name(r.family)).c_str(),
                    r.params.location, r.params.shape, r.params.scale, r.ks, r.aic,
                    r.converged ? "converged" : "not converged");
      out << buf;
    }
    for (const auto& f : sel.failures) {
      out << "  " << fitting::family_name(f.family) << ": failed (" << f.reason << ")\n";
    }
  };

  nlohmann::json j;
  if (axes.films) run_axis(d.films, "Tropes per film", opt.json ? &j["films"] : nullptr);
  if (axes.tropes) {
    const auto reverse = dataset::reverse_index(d);
    run_axis(reverse.tropes, "Films per trope", opt.json ? &j["tropes"] : nullptr);
  }
  if (opt.json) out << j.dump(2) << "\n";
  return kOk;
}

int cmd_rank(const Options& opt, std::ostream& out) {
  const auto d = dataset::load_dataset_file(opt.dataset);
  const auto axes = parse_axis(opt.axis);
  auto print = [&](const std::map<std::string, std::vector<std::string>>& index,
                   const char* title) {
    out << title << "\n";
    for (const auto& e : report::top_k(index, opt.top)) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "  %3zu  %-40s %6zu\n", e.position, e.name.c_str(), e.count);
      out << buf;
    }
  };
  if (axes.films) print(d.films, "Top films by trope count");
  if (axes.tropes) {
    const auto reverse = dataset::reverse_index(d);
    print(reverse.tropes, "Top tropes by film count");
  }
  return kOk;
}

int cmd_report(const Options& opt, std::ostream& out) {
  const auto d = dataset::load_dataset_file(opt.dataset);
  const auto families = parse_families(opt.families);
  const auto inputs = report::analyze(d, opt.top, families);
  const auto bundle = report::render_report(inputs);
  report::write_bundle(bundle, opt.outdir);
  out << "report written to " << opt.outdir << "\n";
  return kOk;
}

int cmd_synth(const Options& opt, std::ostream& out) {
  const auto f = fitting::family_from_name(opt.family);
  if (!f) throw CLI::ValidationError("--family", "unknown family '" + opt.family + "'");
  fitting::FitParams p;
  p.location = opt.location;
  p.shape = opt.shape;
  p.scale = opt.scale;
  if (!(p.shape > 0) || !(p.scale > 0))
    throw CLI::ValidationError("--shape/--scale", "must be positive");
  const auto values = fitting::sample(*f, p, opt.n, opt.seed);

  std::ofstream file;
  std::ostream* sink = &out;
  if (!opt.output.empty()) {
    file.open(opt.output, std::ios::binary | std::ios::trunc);
    if (!file) throw ntriples::IoError("cannot open '" + opt.output + "' for writing");
    sink = &file;
  }
  char buf[64];
  for (const double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    (*sink) << buf;
  }
  if (!opt.output.empty()) {
    file.flush();
    if (!file) throw ntriples::IoError("write failed on '" + opt.output + "'");
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Film-trope dataset extraction and analysis"};
  app.require_subcommand(1);
  Options opt;

  auto* extract = app.add_subcommand("extract", "Parse an N-Triples dump into a dataset file");
  extract->add_option("--input", opt.input, "N-Triples file, optionally gzip-compressed")
      ->required();
  extract->add_option("--config", opt.config, "extraction config JSON");
  extract->add_option("--output", opt.output, "dataset file to write")->required();
  extract->add_option("--policy", opt.policy, "parser policy")
      ->check(CLI::IsMember({"strict", "lenient"}));

  auto* stats_cmd = app.add_subcommand("stats", "Descriptive statistics of a dataset");
  stats_cmd->add_option("--dataset", opt.dataset, "dataset file")->required();
  stats_cmd->add_option("--axis", opt.axis, "films, tropes or both")
      ->check(CLI::IsMember({"films", "tropes", "both"}));
  stats_cmd->add_flag("--json", opt.json, "machine-readable output");

  auto* fit = app.add_subcommand("fit", "Fit heavy-tailed distributions to a degree sequence");
  fit->add_option("--dataset", opt.dataset, "dataset file")->required();
  fit->add_option("--axis", opt.axis, "films, tropes or both")
      ->check(CLI::IsMember({"films", "tropes", "both"}));
  fit->add_option("--families", opt.families, "comma-separated candidate families");
  fit->add_flag("--json", opt.json, "machine-readable output");

  auto* rank = app.add_subcommand("rank", "Top-K ranking by degree");
  rank->add_option("--dataset", opt.dataset, "dataset file")->required();
  rank->add_option("--axis", opt.axis, "films, tropes or both")
      ->check(CLI::IsMember({"films", "tropes", "both"}));
  rank->add_option("--top", opt.top, "number of entries")->check(CLI::PositiveNumber);

  auto* rep = app.add_subcommand("report", "Full analysis bundle from a dataset file");
  rep->add_option("--dataset", opt.dataset, "dataset file")->required();
  rep->add_option("--outdir", opt.outdir, "output directory");
  rep->add_option("--top", opt.top, "ranking length")->check(CLI::PositiveNumber);
  rep->add_option("--families", opt.families, "comma-separated candidate families");

  auto* synth = app.add_subcommand("synth", "Draw synthetic samples from a fitted family");
  synth->add_option("--family", opt.family, "distribution family");
  synth->add_option("--n", opt.n, "sample count")->check(CLI::PositiveNumber);
  synth->add_option("--seed", opt.seed, "RNG seed");
  synth->add_option("--location", opt.location, "location parameter");
  synth->add_option("--shape", opt.shape, "shape parameter");
  synth->add_option("--scale", opt.scale, "scale parameter");
  synth->add_option("--output", opt.output, "write samples to a file instead of stdout");

  std::vector<const char*> argv;
  argv.push_back("tropescope");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsageError;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  try {
    if (extract->parsed()) return cmd_extract(opt, out);
    if (stats_cmd->parsed()) return cmd_stats(opt, out);
    if (fit->parsed()) return cmd_fit(opt, out);
    if (rank->parsed()) return cmd_rank(opt, out);
    if (rep->parsed()) return cmd_report(opt, out);
    if (synth->parsed()) return cmd_synth(opt, out);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  } catch (const ntriples::SyntaxError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const dataset::DatasetFormatError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const extraction::ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const fitting::FitError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const report::ReportError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ntriples::IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

int main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace tropescope::cli
