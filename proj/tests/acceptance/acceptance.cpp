// End-to-end acceptance checks. With no arguments every criterion runs; with
// numbers only those run. Each prints one PASS/FAIL line; the exit status is
// nonzero when any selected criterion fails.

#include <sys/wait.h>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "nlv/checker/checker.hpp"
#include "nlv/cli/corpus.hpp"
#include "nlv/cli/run.hpp"
#include "nlv/cli/search_backend.hpp"
#include "nlv/search/certificate_io.hpp"
#include "nlv/search/search.hpp"
#include "nlv/search/transform.hpp"
#include "support/oracle.hpp"
#include "support/problems.hpp"

using namespace nlv;
using nlohmann::json;
using search::CertificateList;
using search::Direction;
using search::NodeKind;
using search::ResultTree;
using search::Tree;
using testing::Fixture;

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Result {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

std::string fixed(double x, int digits = 3) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(digits) << x;
  return o.str();
}

struct CorpusRun {
  int code;
  json report;
  double seconds;
};

CorpusRun run_corpus(const std::string& name, const std::function<void(cli::RunConfig&)>& tweak = {}) {
  cli::RunConfig cfg;
  cfg.corpus_name = name;
  cfg.report = cli::ReportFormat::machine;
  if (tweak) tweak(cfg);
  std::ostringstream out, err;
  const auto t = Clock::now();
  const int code = cli::run(cfg, out, err, cli::search_backend());
  const double s = since(t);
  json j;
  try {
    j = json::parse(out.str());
  } catch (const json::exception&) {
    j = json::object();
  }
  return {code, j, s};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Golden certificates and the corpus entries they belong to.
std::vector<std::pair<std::string, CertificateList>> goldens() {
  std::vector<std::pair<std::string, CertificateList>> out;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(NLV_GOLDEN_DIR))
    if (e.path().extension() == ".cert") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) out.emplace_back(p.stem().string(), search::parse_certificate(slurp(p)));
  return out;
}

// ---------------------------------------------------------------------------

Result polynomial_benchmarks() {
  Result r;
  for (const char* name : {"schwefel", "caprasse", "magnetism", "heart"}) {
    const CorpusRun run = run_corpus(name);
    const bool accepted = run.code == cli::kVerified && run.report.value("status", "") == "verified";
    r.require(accepted, std::string(name) + " not accepted");
    r.require(run.seconds < 300, std::string(name) + " over 5 minutes");
    r.detail << name << " " << fixed(run.seconds) << " s; ";
  }
  return r;
}

Result flyspeck_and_two_variable() {
  Result r;
  const CorpusRun delta = run_corpus("4717061266");
  r.require(delta.code == cli::kVerified, "4717061266 not verified");
  r.require(delta.seconds < 300, "4717061266 over 5 minutes");
  const CorpusRun two = run_corpus("two-variable");
  r.require(two.code == cli::kVerified, "two-variable not verified");
  r.require(two.seconds < 60, "two-variable over 1 minute");
  r.detail << "4717061266 " << fixed(delta.seconds) << " s; two-variable " << fixed(two.seconds) << " s";
  return r;
}

Result dependency_problem() {
  Result r;
  {
    const Fixture f("0 <= x <= 1 |- x - x < 1");
    const numeric::RigorousArith a({200, 5});
    const taylor::Evaluator<numeric::RigorousArith> ev(f.cp, a);
    const numeric::Interval direct = ev.value({a.hull(f.root.lo[0], f.root.hi[0])});
    r.require(direct.hi.sign() >= 0, "direct evaluation of x - x - 1 already decides");
    const auto out = search::certificate_search(f.cp, f.root, {});
    r.require(out.status == search::SearchStatus::verified, "x - x < 1 not verified");
    r.require(out.stats.splits == 0 && out.tree->kind == NodeKind::pass && !out.tree->direct,
              "x - x < 1 needed subdivision or direct evaluation");
    r.require(checker::Checker(f.cp, {{200, 5}}).check_list(search::transform_certificate(out.tree, f.root)).accepted,
              "x - x < 1 rejected by the checker");
    r.detail << "x - x - 1 direct hi " << direct.hi.to_string(4) << ", Taylor pass with " << out.stats.splits
             << " splits; ";
  }
  {
    const Fixture f("0 <= x <= 1 |- x - atan(x) < 1");
    const auto out = search::certificate_search(f.cp, f.root, {});
    r.require(out.status == search::SearchStatus::verified && out.stats.splits == 0,
              "x - atan x < 1 needed subdivision");
    const Fixture g("0 <= x <= 1 |- x - atan(x) < 0");
    for (int digits : {5, 8, 12}) {
      const numeric::RigorousArith a({200, digits});
      const taylor::Evaluator<numeric::RigorousArith> ev(g.cp, a);
      const auto ti = taylor::make_taylor_interval(ev, taylor::make_domain(g.root.lo, g.root.hi, a));
      const double bound = taylor::taylor_upper_bound(ti, a).to_double();
      r.detail << "x - atan x bound at " << digits << " digits " << fixed(bound, 5) << "; ";
      r.require(bound > 0.39 && bound < 0.41, "bound outside (0.39, 0.41) at " + std::to_string(digits) + " digits");
    }
  }
  return r;
}

Result worked_example() {
  Result r;
  const Fixture f("-1 <= x <= 1 |- x - 2 < 0");
  search::SearchParams p;
  p.min_split_depth = 1;
  p.mono_first = true;
  const auto out = search::certificate_search(f.cp, f.root, p);
  r.require(out.status == search::SearchStatus::verified, "search did not verify");
  const CertificateList list = search::transform_certificate(out.tree, f.root);
  const CertificateList expected = search::parse_certificate(
      "[r1]: MONO[1+]{PASS*}\n"
      "[l1]: MONO[1+]{REF(0)}\n"
      "[]: GLUE(1,0){REF(1),REF(0)}\n");
  r.require(list == expected, "list differs from the three-entry example");
  r.require(checker::Checker(f.cp, {{200, 5}}).check_list(list).accepted, "checker rejected the list");
  std::string text = search::to_text(list);
  std::replace(text.begin(), text.end(), '\n', ' ');
  r.detail << text.substr(text.find('['));
  return r;
}

/// Decreasing statuses whose fast-tier gradient enclosure (direct evaluation
/// intersected with the Taylor bound, as the search computes it) has hi >= 0.
std::size_t non_strict_decreasing(const Fixture& f, const CertificateList& list, std::size_t& decreasing) {
  const numeric::FastArith fa;
  const taylor::Evaluator<numeric::FastArith> ev(f.cp, fa);
  std::size_t bad = 0;
  for (const auto& e : list) {
    testing::walk(e.tree, search::apply_path(f.root, e.path), [&](const Tree& t, const search::Box& box) {
      if (t->kind != NodeKind::mono) return;
      const search::FastBox fb = search::to_fast_box(box);
      std::vector<numeric::FastInterval> iv;
      for (std::size_t i = 0; i < fb.size(); ++i) iv.push_back({fb.lo[i], fb.hi[i]});
      const auto grad = ev.gradient(iv);
      const auto ti = taylor::make_taylor_interval(ev, taylor::make_domain(fb.lo, fb.hi, fa));
      for (const auto& s : t->statuses) {
        if (s.dir != Direction::decreasing) continue;
        ++decreasing;
        const double hi = std::min(grad[static_cast<std::size_t>(s.coord)].hi, taylor::bound_gradient(ti, s.coord, fa).hi);
        if (hi >= 0) ++bad;
      }
    });
  }
  return bad;
}

Result monotonicity_caveat() {
  Result r;
  const CorpusRun run = run_corpus("neg-square");
  r.require(run.code == cli::kVerified, "-x^2 - 1 < 0 not verified end to end");
  const Fixture f("-1 <= x <= 1 |- -x^2 - 1 < 0");
  std::size_t decreasing = 0, bad = 0;
  for (int split : {0, 1, 2, 3}) {
    for (bool mono_first : {false, true}) {
      const auto result = cli::search_backend()(f.cp, f.root, {80, split, mono_first, 1});
      r.require(result.status == cli::SearchResult::Status::verified, "forced-split variant not verified");
      if (result.status != cli::SearchResult::Status::verified) continue;
      bad += non_strict_decreasing(f, result.certificate, decreasing);
      r.require(checker::Checker(f.cp, {{200, 5}}).check_list(result.certificate).accepted,
                "forced-split variant rejected");
    }
  }
  r.require(bad == 0, "decreasing status from a non-strict enclosure");
  r.detail << "verified in " << fixed(run.seconds) << " s; 8 search variants, " << decreasing
           << " decreasing statuses, " << bad << " non-strict";
  return r;
}

// Interval operation soundness: random intervals, random points inside,
// reference values from exact rationals or MPFR.
std::size_t op_soundness(std::size_t cases, std::size_t& total) {
  std::mt19937_64 rng(97);
  std::size_t violations = 0;
  const numeric::Precision precs[] = {{200, 5}, {10, 3}, {2, 24}, {200, 2}};
  enum Op { add, sub, mul, div, pow, sqrt, atan, acos, kOps };
  for (int op = 0; op < kOps; ++op) {
    for (std::size_t k = 0; k < cases; ++k) {
      const numeric::Precision prec = precs[k % 4];
      const numeric::RigorousArith a(prec, false);
      auto interval = [&](bool positive, bool unit) {
        numeric::PreciseFloat x = testing::random_float(rng, prec, unit ? 0 : -2, unit ? 0 : 1);
        numeric::PreciseFloat y = testing::random_float(rng, prec, unit ? 0 : -2, unit ? 0 : 1);
        if (positive) x = numeric::abs(x), y = numeric::abs(y);
        if (y < x) std::swap(x, y);
        return numeric::Interval{x, y};
      };
      auto point = [&](const numeric::Interval& i) {
        return testing::random_point(rng, i.lo.to_rational(), i.hi.to_rational());
      };
      auto inside = [](const numeric::Interval& i, const mpq_class& lo, const mpq_class& hi) {
        return i.lo.to_rational() <= lo && hi <= i.hi.to_rational();
      };
      bool ok = true;
      try {
        switch (op) {
          case add: case sub: case mul: case div: {
            const numeric::Interval x = interval(false, false);
            numeric::Interval y = interval(op == div, false);
            if (op == div && y.lo.is_zero()) continue;
            const mpq_class px = point(x), py = point(y);
            const mpq_class v = op == add ? mpq_class(px + py) : op == sub ? mpq_class(px - py)
                              : op == mul ? mpq_class(px * py) : mpq_class(px / py);
            const numeric::Interval res = op == add ? a.add(x, y) : op == sub ? a.sub(x, y)
                                        : op == mul ? a.mul(x, y) : a.div(x, y);
            ok = inside(res, v, v);
            break;
          }
          case pow: {
            const numeric::Interval x = interval(false, false);
            const unsigned e = static_cast<unsigned>(rng() % 7);
            const mpq_class px = point(x);
            mpq_class v = 1;
            for (unsigned i = 0; i < e; ++i) v *= px;
            ok = inside(a.pow(x, e), v, v);
            break;
          }
          default: {
            const numeric::Interval x = interval(op == sqrt, op == acos);
            const mpq_class px = point(x);
            const testing::Fn fn = op == sqrt ? testing::Fn::sqrt : op == atan ? testing::Fn::atan : testing::Fn::acos;
            const auto [lo, hi] = testing::mpfr_bounds(fn, px);
            const numeric::Interval res = op == sqrt ? a.sqrt(x) : op == atan ? a.atan(x) : a.acos(x);
            ok = inside(res, lo, hi);
            break;
          }
        }
      } catch (const numeric::DomainError&) {
        continue;
      }
      ++total;
      violations += !ok;
    }
  }
  return violations;
}

Result soundness_suite() {
  Result r;
  std::mt19937_64 rng(101);
  int accepted = 0, refuted = 0, inconclusive = 0;
  std::size_t violations = 0;
  const int problems = 200;
  for (int k = 0; k < problems; ++k) {
    const Fixture f(testing::random_problem(rng, k % 2 == 1));
    const auto result = cli::search_backend()(f.cp, f.root, {24, 0, k % 3 == 0, 1});
    if (result.status != cli::SearchResult::Status::verified) {
      (result.status == cli::SearchResult::Status::refuted ? refuted : inconclusive)++;
      continue;
    }
    if (!checker::Checker(f.cp, {{200, 5}}).check_list(result.certificate).accepted) continue;
    ++accepted;
    const std::size_t bad = testing::sample_violations(f, 100000, rng);
    if (bad) std::cerr << "sampling violation on " << expr::to_string(f.cp.problem) << '\n';
    violations += bad;
  }
  std::size_t op_cases = 0;
  const std::size_t op_bad = op_soundness(10000, op_cases);
  r.require(violations == 0, "sampling violations on accepted problems");
  r.require(op_bad == 0, "interval operation violations");
  r.require(accepted >= problems / 4, "too few accepted problems for a meaningful sample");
  r.detail << problems << " problems: " << accepted << " accepted, " << refuted << " refuted, " << inconclusive
           << " inconclusive; " << violations << " violations in " << accepted << "x100000 points; " << op_bad
           << " violations in " << op_cases << " interval operations";
  return r;
}

// Preorder index of every node, used to pick a mutation target.
std::size_t count(const Tree& t) { return search::count_nodes(t); }

Tree replace_at(const Tree& t, std::size_t target, std::size_t& index, const std::function<Tree(const Tree&)>& fn) {
  if (index++ == target) return fn(t);
  if (t->children.empty()) return t;
  std::vector<Tree> kids;
  for (const Tree& c : t->children) kids.push_back(replace_at(c, target, index, fn));
  auto copy = std::make_shared<ResultTree>(*t);
  copy->children = std::move(kids);
  return copy;
}

Result tamper_suite() {
  Result r;
  std::mt19937_64 rng(103);
  std::size_t mutants = 0, rejected = 0, structural = 0, structural_accepted = 0, unsound = 0;
  for (const auto& [name, list] : goldens()) {
    const auto entry = cli::find_corpus_entry(name);
    if (!entry) continue;
    const Fixture f(entry->problem);
    const checker::Checker c(f.cp, {{200, 5}});
    const int n = f.cp.dimension();
    for (int m = 0; m < 20; ++m) {
      CertificateList mutant = list;
      const std::size_t e = rng() % mutant.size();
      const unsigned kind = static_cast<unsigned>(rng() % 6);
      if (kind == 5) {
        // Widen the box an entry speaks about: drop its last path step, or
        // give the root entry a path.
        if (mutant[e].path.empty()) mutant[e].path.push_back({search::Side::left, 0});
        else mutant[e].path.pop_back();
      } else {
        std::size_t index = 0;
        const std::size_t target = rng() % count(mutant[e].tree);
        mutant[e].tree = replace_at(mutant[e].tree, target, index, [&](const Tree& t) -> Tree {
          auto copy = std::make_shared<ResultTree>(*t);
          switch (t->kind) {
            case NodeKind::pass: copy->direct = !copy->direct; break;
            case NodeKind::ref: copy->ref = rng() % (mutant.size() + 1); break;
            case NodeKind::mono: {
              auto& s = copy->statuses[rng() % copy->statuses.size()];
              if (rng() & 1) s.dir = s.dir == Direction::increasing ? Direction::decreasing : Direction::increasing;
              else s.coord = static_cast<int>(rng() % static_cast<unsigned>(n + 1));
              break;
            }
            case NodeKind::glue:
              if (rng() & 1) copy->convex = !copy->convex;
              else copy->coord = static_cast<int>(rng() % static_cast<unsigned>(n + 1));
              break;
            default: break;
          }
          if (kind == 4) return ResultTree::pass(rng() & 1);  // prune the subtree
          return copy;
        });
      }
      ++mutants;
      const bool malformed = !search::validate_structure(mutant, n).empty();
      const checker::CheckReport rep = c.check_list(mutant);
      structural += malformed;
      if (!rep.accepted) {
        ++rejected;
        continue;
      }
      if (malformed) ++structural_accepted;
      // An accepted mutant must still be a sound statement.
      if (testing::sample_violations(f, 10000, rng) > 0) ++unsound;
    }
  }
  r.require(mutants >= 100, "fewer than 100 mutants");
  r.require(unsound == 0, "unsound acceptance");
  r.require(structural_accepted == 0, "structurally malformed mutant accepted");
  r.detail << mutants << " mutants: " << rejected << " rejected, " << mutants - rejected
           << " accepted (all sound); " << structural << " malformed, " << structural_accepted << " of them accepted";
  return r;
}

double best_replay(const checker::Checker& c, const CertificateList& list, bool& accepted) {
  double best = 1e300;
  double spent = 0;
  int reps = 0;
  while (reps < 3 || (spent < 0.5 && reps < 200)) {
    const auto t = Clock::now();
    accepted = c.check_list(list).accepted;
    const double s = since(t);
    best = std::min(best, s);
    spent += s;
    ++reps;
  }
  return best;
}

Result adaptive_precision() {
  Result r;
  int faster = 0, total = 0;
  for (const char* name : {"caprasse", "magnetism", "heart", "two-variable", "4717061266"}) {
    const auto entry = cli::find_corpus_entry(name);
    const Fixture f(entry->problem);
    const auto result = cli::search_backend()(f.cp, f.root, {80, 0, false, 1});
    if (result.status != cli::SearchResult::Status::verified) {
      r.require(false, std::string(name) + " not verified by search");
      continue;
    }
    // Fresh checkers so neither replay profits from the other's cache.
    const checker::Checker annotator(f.cp, {{200, 5}});
    const CertificateList ann = checker::annotate_adaptive(annotator, result.certificate, 5);
    int max_digits = 0;
    for (const auto& e : ann)
      testing::walk(e.tree, search::apply_path(f.root, e.path), [&](const Tree& t, const search::Box&) {
        max_digits = std::max(max_digits, t->precision);
      });
    bool plain_ok = false, ann_ok = false;
    const double plain = best_replay(checker::Checker(f.cp, {{200, 5}}), result.certificate, plain_ok);
    const double fast = best_replay(checker::Checker(f.cp, {{200, 5}}), ann, ann_ok);
    r.require(max_digits <= 5, std::string(name) + " annotated above the default");
    r.require(!plain_ok || ann_ok, std::string(name) + " annotated replay rejected");
    ++total;
    faster += fast <= plain;
    r.detail << name << " " << fixed(plain * 1e3, 2) << " -> " << fixed(fast * 1e3, 2) << " ms (max " << max_digits
             << "); ";
  }
  r.require(faster >= 3, "annotated replay faster on fewer than 3 of 5");
  r.detail << faster << "/" << total << " faster";
  return r;
}

int exit_status(const std::string& command) {
  const int raw = std::system(command.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Result checker_independence() {
  Result r;
  const std::string bin = NLV_CHECK_BINARY;
  int ok = 0, total = 0;
  for (const auto& [name, list] : goldens()) {
    (void)list;
    if (!cli::find_corpus_entry(name)) continue;
    ++total;
    const std::string cert = std::string(NLV_GOLDEN_DIR) + "/" + name + ".cert";
    const int code = exit_status(bin + " --corpus " + name + " --mode check-only --cert " + cert + " > /dev/null");
    r.require(code == 0, name + " not accepted by the check-only binary");
    ok += code == 0;
  }
  const int full = exit_status(bin + " --corpus x-minus-2 > /dev/null 2>&1");
  r.require(full == cli::kUsage, "check-only binary ran a search");
  r.detail << ok << "/" << total << " golden certificates accepted by a binary without the search module; "
           << "full mode exits " << full;
  return r;
}

struct Criterion {
  int id;
  const char* title;
  Result (*fn)();
};

const Criterion kCriteria[] = {
    {1, "polynomial benchmarks verified", polynomial_benchmarks},
    {2, "delta and two-variable inequalities verified", flyspeck_and_two_variable},
    {3, "dependency problem solved by Taylor bounds", dependency_problem},
    {4, "x - 2 certificate list", worked_example},
    {5, "strict decreasing check on -x^2 - 1", monotonicity_caveat},
    {6, "soundness sampling", soundness_suite},
    {7, "tampered certificates", tamper_suite},
    {8, "adaptive precision", adaptive_precision},
    {9, "checker without the search module", checker_independence},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  bool all_pass = true;
  for (const Criterion& c : kCriteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto t = Clock::now();
    Result r;
    try {
      r = c.fn();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail << "exception: " << e.what();
    }
    all_pass = all_pass && r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.title << " (" << fixed(since(t), 1)
              << " s): " << r.detail.str() << std::endl;
  }
  return all_pass ? 0 : 1;
}
