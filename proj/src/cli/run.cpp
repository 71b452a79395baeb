#include "nlv/cli/run.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "nlv/checker/checker.hpp"
#include "nlv/cli/corpus.hpp"
#include "nlv/expr/parser.hpp"
#include "nlv/search/certificate_io.hpp"

namespace nlv::cli {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::ordered_json;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::full: return "full";
    case Mode::search_only: return "search-only";
    case Mode::check_only: return "check-only";
    case Mode::annotate: return "annotate";
  }
  return "?";
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(std::string("cannot read ") + what + " '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text, const char* what) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw UsageError(std::string("cannot write ") + what + " '" + path + "'");
}

std::string seconds_text(double s) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(3) << s << " s";
  return o.str();
}

// Everything the report prints, gathered during the run.
struct Summary {
  std::string problem;
  int dimension = 0;
  std::string status;
  int exit_code = kUsage;
  std::optional<SearchResult> search;
  double search_seconds = 0;
  std::optional<std::size_t> entries, nodes;
  std::optional<checker::CheckReport> check;
  std::optional<std::string> counterexample;
  bool counterexample_confirmed = false;
  double total_seconds = 0;
};

ordered_json to_json(const Summary& s, const RunConfig& cfg) {
  ordered_json j;
  j["problem"] = s.problem;
  j["dimension"] = s.dimension;
  j["mode"] = mode_name(cfg.mode);
  j["status"] = s.status;
  j["exit_code"] = s.exit_code;
  j["precision"] = {{"base", cfg.base}, {"digits", cfg.digits}};
  if (s.search) {
    const char* st = s.search->status == SearchResult::Status::verified  ? "verified"
                     : s.search->status == SearchResult::Status::refuted ? "refuted"
                                                                         : "inconclusive";
    j["search"] = {{"status", st},
                   {"nodes", s.search->nodes},
                   {"max_depth", s.search->depth},
                   {"fallback", s.search->fallback},
                   {"seconds", s.search_seconds}};
  } else {
    j["search"] = nullptr;
  }
  if (s.entries) j["certificate"] = {{"entries", *s.entries}, {"nodes", *s.nodes}};
  else j["certificate"] = nullptr;
  if (s.check) {
    const auto& r = *s.check;
    ordered_json c;
    c["accepted"] = r.accepted;
    c["rules"] = {{"pass", r.counts.pass},           {"pass_direct", r.counts.pass_direct},
                  {"mono", r.counts.mono},           {"glue", r.counts.glue_split},
                  {"glue_convex", r.counts.glue_convex}, {"ref", r.counts.ref}};
    c["max_precision"] = r.max_precision;
    c["seconds"] = r.seconds;
    if (r.accepted) c["failure"] = nullptr;
    else
      c["failure"] = {{"entry", r.failed_entry}, {"path", search::to_text(r.failed_path)}, {"message", r.failure}};
    j["check"] = c;
  } else {
    j["check"] = nullptr;
  }
  if (s.counterexample) j["counterexample"] = {{"box", *s.counterexample}, {"confirmed", s.counterexample_confirmed}};
  else j["counterexample"] = nullptr;
  j["total_seconds"] = s.total_seconds;
  return j;
}

void print_text(const Summary& s, const RunConfig& cfg, std::ostream& out) {
  auto row = [&](const char* key, const std::string& value) { out << std::left << std::setw(16) << key << value << '\n'; };
  row("problem", s.problem + " (" + std::to_string(s.dimension) + " variables)");
  row("status", s.status);
  if (s.search)
    row("search", "nodes " + std::to_string(s.search->nodes) + ", max depth " + std::to_string(s.search->depth) +
                      (s.search->fallback ? ", without deferred faces" : "") + ", " + seconds_text(s.search_seconds));
  if (s.counterexample)
    row(s.counterexample_confirmed ? "counterexample" : "undecided",
        *s.counterexample + (s.counterexample_confirmed ? " (goal >= 0 at its midpoint)" : ""));
  if (s.entries) row("certificate", std::to_string(*s.entries) + " entries, " + std::to_string(*s.nodes) + " nodes");
  if (s.check) {
    const auto& r = *s.check;
    row("checker", std::string(r.accepted ? "accepted" : "rejected") + " at base " + std::to_string(cfg.base) +
                       ", digits " + std::to_string(cfg.digits) + " (max used " + std::to_string(r.max_precision) +
                       ")");
    row("rules", "pass " + std::to_string(r.counts.pass) + ", pass* " + std::to_string(r.counts.pass_direct) +
                     ", mono " + std::to_string(r.counts.mono) + ", glue " + std::to_string(r.counts.glue_split) +
                     ", convex " + std::to_string(r.counts.glue_convex) + ", ref " + std::to_string(r.counts.ref));
    if (!r.accepted) row("failure", checker::failure_location(r) + ": " + r.failure);
  }
  row("time", "total " + seconds_text(s.total_seconds) +
                  (s.check ? ", checker " + seconds_text(s.check->seconds) : std::string()));
}

expr::Problem load_problem(const RunConfig& cfg, std::string& name) {
  if (!cfg.corpus_name.empty()) {
    auto e = find_corpus_entry(cfg.corpus_name);
    if (!e) throw UsageError("unknown corpus entry '" + cfg.corpus_name + "'");
    name = e->name;
    return e->problem;
  }
  name = cfg.input;
  return expr::parse_problem(read_file(cfg.input, "problem file"));
}

// Midpoint of the box evaluated rigorously; true when goal >= 0 there.
bool confirm_counterexample(const taylor::CompiledProblem& cp, const search::Box& box, const numeric::Precision& prec) {
  if (box.size() != static_cast<std::size_t>(cp.dimension())) return false;
  const numeric::RigorousArith a(prec, false);
  const taylor::Evaluator<numeric::RigorousArith> ev(cp, a);
  std::vector<numeric::Interval> x;
  for (std::size_t i = 0; i < box.size(); ++i) x.push_back(a.point(numeric::exact_midpoint(box.lo[i], box.hi[i])));
  try {
    return ev.value(x).lo.sign() >= 0;
  } catch (const numeric::DomainError&) {
    return false;
  }
}

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err, const SearchBackend& backend) {
  const auto start = Clock::now();
  Summary s;
  expr::Problem problem;
  try {
    problem = load_problem(cfg, s.problem);
  } catch (const expr::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  s.dimension = problem.dimension();
  const taylor::CompiledProblem cp(std::move(problem));
  const numeric::Precision prec{cfg.base, cfg.digits};
  const search::Box root = search::root_box(cp.problem, prec);

  search::CertificateList list;
  const bool searching = cfg.mode == Mode::full || cfg.mode == Mode::search_only;
  if (searching) {
    if (!backend) throw UsageError(std::string("mode '") + mode_name(cfg.mode) + "' needs the search module");
    const auto t = Clock::now();
    s.search = backend(cp, root, {cfg.max_depth, cfg.force_split, cfg.mono_first, cfg.workers});
    s.search_seconds = since(t);
    if (s.search->status != SearchResult::Status::verified) {
      const bool refuted = s.search->status == SearchResult::Status::refuted;
      s.status = refuted ? "refuted" : "inconclusive";
      s.exit_code = refuted ? kRejected : kInconclusive;
      s.counterexample = search::to_string(s.search->witness);
      s.counterexample_confirmed = refuted && confirm_counterexample(cp, s.search->witness, prec);
    } else {
      list = s.search->certificate;
      if (!cfg.cert.empty()) write_file(cfg.cert, search::to_text(list), "certificate");
    }
  } else {
    try {
      list = search::parse_certificate(read_file(cfg.cert, "certificate"));
    } catch (const search::CertificateFormatError& e) {
      err << "error: " << e.what() << '\n';
      return kUsage;
    }
  }

  if (s.status.empty()) {
    s.entries = list.size();
    std::size_t nodes = 0;
    for (const auto& e : list) nodes += search::count_nodes(e.tree);
    s.nodes = nodes;
    if (cfg.mode == Mode::search_only) {
      s.status = "verified by search";
      s.exit_code = kVerified;
    } else {
      checker::CheckOptions opts;
      opts.precision = prec;
      opts.use_cache = cfg.use_cache;
      opts.workers = cfg.workers;
      opts.audit = !cfg.audit.empty();
      const checker::Checker chk(cp, opts);
      if (cfg.mode == Mode::annotate || cfg.annotate) {
        list = checker::annotate_adaptive(chk, list, cfg.digits);
        if (cfg.mode == Mode::annotate) write_file(cfg.out, search::to_text(list), "annotated certificate");
        else if (!cfg.cert.empty()) write_file(cfg.cert, search::to_text(list), "certificate");
      }
      s.check = chk.check_list(list);
      if (!cfg.audit.empty()) {
        std::string text;
        for (const auto& line : s.check->audit) text += line + '\n';
        write_file(cfg.audit, text, "audit log");
      }
      s.status = s.check->accepted ? "verified" : "rejected";
      s.exit_code = s.check->accepted ? kVerified : kRejected;
    }
  }
  s.total_seconds = since(start);
  if (cfg.report == ReportFormat::machine) out << to_json(s, cfg).dump(2) << '\n';
  else print_text(s, cfg, out);
  return s.exit_code;
}

}  // namespace

std::string validate(const RunConfig& cfg) {
  if (cfg.digits < 1) return "digits must be at least 1";
  if (cfg.base < 2) return "base must be at least 2";
  if (cfg.max_depth < 0) return "max depth must be non-negative";
  if (cfg.workers < 1) return "workers must be at least 1";
  if (cfg.input.empty() == cfg.corpus_name.empty()) return "give exactly one of a problem file or --corpus";
  if ((cfg.mode == Mode::check_only || cfg.mode == Mode::annotate) && cfg.cert.empty())
    return std::string(mode_name(cfg.mode)) + " mode requires --cert";
  if (cfg.mode == Mode::annotate && cfg.out.empty()) return "annotate mode requires --out";
  return {};
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err, const SearchBackend& backend) {
  if (const std::string problem = validate(cfg); !problem.empty()) {
    err << "error: " << problem << '\n';
    return kUsage;
  }
  try {
    return execute(cfg, out, err, backend);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const search::GeometryError& e) {
    err << "error: " << e.what() << '\n';
  }
  return kUsage;
}

int main_with_args(int argc, char** argv, const SearchBackend& backend) {
  RunConfig cfg;
  CLI::App app{"Verify that a goal is negative on a box, with a replayable certificate."};
  bool list_corpus = false, print_problem = false, no_cache = false;
  std::string mode = "full", report = "text";
  app.add_option("input", cfg.input, "problem file");
  app.add_option("--corpus", cfg.corpus_name, "use a built-in problem instead of a file");
  app.add_option("--digits", cfg.digits, "mantissa digits of the checker arithmetic")->capture_default_str();
  app.add_option("--base", cfg.base, "base of the checker arithmetic")->capture_default_str();
  app.add_option("--max-depth", cfg.max_depth, "maximum number of splits along a branch")->capture_default_str();
  app.add_option("--mode", mode, "full, search-only, check-only or annotate")
      ->check(CLI::IsMember({"full", "search-only", "check-only", "annotate"}))
      ->capture_default_str();
  app.add_option("--cert", cfg.cert, "certificate file (written by full/search-only, read by check-only/annotate)");
  app.add_option("--out", cfg.out, "annotated certificate written by annotate mode");
  app.add_option("--audit", cfg.audit, "write the checker's rule log to this file");
  app.add_option("--report", report, "text or machine")->check(CLI::IsMember({"text", "machine"}))->capture_default_str();
  app.add_option("--workers", cfg.workers, "threads for search and checking")->capture_default_str();
  app.add_flag("--no-cache", no_cache, "disable the checker's operation cache");
  app.add_option("--force-split", cfg.force_split, "split unconditionally above this depth")->capture_default_str();
  app.add_flag("--mono-first", cfg.mono_first, "try monotonicity before the bound checks");
  app.add_flag("--annotate", cfg.annotate, "annotate minimal precisions before checking (full mode)");
  app.add_flag("--list-corpus", list_corpus, "list the built-in problems");
  app.add_flag("--print-problem", print_problem, "print the selected problem and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }
  cfg.use_cache = !no_cache;
  cfg.report = report == "machine" ? ReportFormat::machine : ReportFormat::text;
  cfg.mode = mode == "search-only"  ? Mode::search_only
             : mode == "check-only" ? Mode::check_only
             : mode == "annotate"   ? Mode::annotate
                                    : Mode::full;
  if (list_corpus) {
    for (const auto& e : corpus()) std::cout << std::left << std::setw(14) << e.name << e.description << '\n';
    return 0;
  }
  if (print_problem) {
    try {
      std::string name;
      std::cout << expr::to_string(load_problem(cfg, name)) << '\n';
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kUsage;
    }
  }
  return run(cfg, std::cout, std::cerr, backend);
}

}  // namespace nlv::cli
