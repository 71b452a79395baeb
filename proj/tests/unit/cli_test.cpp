#include <doctest.h>
#include <json.hpp>

#include <unistd.h>

#include <filesystem>
#include <functional>
#include <random>
#include <fstream>
#include <set>
#include <sstream>

#include "nlv/cli/corpus.hpp"
#include "nlv/cli/run.hpp"
#include "nlv/cli/search_backend.hpp"
#include "nlv/expr/parser.hpp"
#include "nlv/numeric/rigorous.hpp"
#include "nlv/search/certificate_io.hpp"
#include "support/oracle.hpp"

using namespace nlv;
using namespace nlv::cli;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cfg(const RunConfig& cfg, const SearchBackend& backend = search_backend()) {
  std::ostringstream out, err;
  const int code = run(cfg, out, err, backend);
  return {code, out.str(), err.str()};
}

/// Scratch directory removed at scope exit.
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("nlv_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& text = {}) const {
    const fs::path p = path / name;
    if (!text.empty()) std::ofstream(p) << text;
    return p.string();
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Replaces every "seconds" / "total_seconds" value by 0.
void zero_times(json& j) {
  if (!j.is_object()) return;
  for (auto& [k, v] : j.items()) {
    if (k == "seconds" || k == "total_seconds") v = 0;
    else zero_times(v);
  }
}

mpq_class exact_value(const expr::Expr& e) {
  // Constant expressions built from rationals and field operations only.
  const numeric::RigorousArith a({200, 60}, false);
  std::function<numeric::Interval(const expr::Expr&)> go = [&](const expr::Expr& x) -> numeric::Interval {
    using expr::Op;
    switch (x.op()) {
      case Op::constant: return a.constant(x.value());
      case Op::neg: return a.neg(go(x.child(0)));
      case Op::add: return a.add(go(x.child(0)), go(x.child(1)));
      case Op::sub: return a.sub(go(x.child(0)), go(x.child(1)));
      case Op::mul: return a.mul(go(x.child(0)), go(x.child(1)));
      case Op::pow: return a.pow(go(x.child(0)), x.exponent());
      default: throw std::logic_error("unexpected operator");
    }
  };
  const numeric::Interval r = go(e);
  REQUIRE(r.lo == r.hi);
  return r.lo.to_rational();
}

std::vector<expr::Expr> constants(std::initializer_list<long> xs) {
  std::vector<expr::Expr> v;
  for (long x : xs) v.push_back(expr::constant(x));
  return v;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config validation") {
  RunConfig cfg;
  CHECK_FALSE(validate(cfg).empty());  // no input
  cfg.corpus_name = "x-minus-2";
  CHECK(validate(cfg).empty());
  cfg.digits = 0;
  CHECK_FALSE(validate(cfg).empty());
  cfg.digits = 5;
  cfg.mode = Mode::check_only;
  CHECK(validate(cfg).find("--cert") != std::string::npos);
  cfg.cert = "c.cert";
  CHECK(validate(cfg).empty());
  cfg.input = "p.nlv";
  CHECK_FALSE(validate(cfg).empty());
  CHECK(run_cfg(cfg).code == kUsage);
}

TEST_CASE("exit codes") {
  TempDir dir;
  RunConfig cfg;
  cfg.input = dir.file("ok.nlv", "-1 <= x <= 1 |- x - 2 < 0\n");
  CHECK(run_cfg(cfg).code == kVerified);

  cfg.input = dir.file("false.nlv", "0 <= x <= 1 |- x < 0\n");
  const Outcome f = run_cfg(cfg);
  CHECK((f.code == kRejected || f.code == kInconclusive));
  CHECK(f.out.find("counterexample") != std::string::npos);

  cfg.input = dir.file("bad.nlv", "0 <= x <= 1 |- x <= 0\n");
  const Outcome bad = run_cfg(cfg);
  CHECK(bad.code == kUsage);
  CHECK(bad.err.find("error") != std::string::npos);

  cfg.input = dir.file("missing.nlv");
  CHECK(run_cfg(cfg).code == kUsage);

  cfg.input = dir.file("edge.nlv", "1 <= x <= 2 |- -(x^2 - 2)^2 < 0\n");
  cfg.max_depth = 5;
  CHECK(run_cfg(cfg).code == kInconclusive);
}

TEST_CASE("refuted corpus entries report a confirmed counterexample") {
  RunConfig cfg;
  cfg.corpus_name = "false-square";
  cfg.report = ReportFormat::machine;
  const Outcome o = run_cfg(cfg);
  CHECK(o.code == kRejected);
  const json j = json::parse(o.out);
  CHECK(j["status"] == "refuted");
  CHECK(j["counterexample"]["confirmed"] == true);
}

TEST_CASE("x - 2 certificate has the three-entry shape") {
  TempDir dir;
  RunConfig cfg;
  cfg.corpus_name = "x-minus-2";
  cfg.force_split = 1;
  cfg.mono_first = true;
  cfg.cert = dir.file("x2.cert");
  REQUIRE(run_cfg(cfg).code == kVerified);
  CHECK(slurp(cfg.cert) ==
        "# nlverify certificate v1\n"
        "[r1]: MONO[1+]{PASS*}\n"
        "[l1]: MONO[1+]{REF(0)}\n"
        "[]: GLUE(1,0){REF(1),REF(0)}\n");
}

TEST_CASE("full then check-only gives identical checker reports") {
  for (const char* name : {"x-minus-2", "two-variable", "heart", "neg-square", "x-minus-atan"}) {
    TempDir dir;
    RunConfig cfg;
    cfg.corpus_name = name;
    cfg.cert = dir.file("c.cert");
    cfg.report = ReportFormat::machine;
    const Outcome full = run_cfg(cfg);
    REQUIRE(full.code == kVerified);
    cfg.mode = Mode::check_only;
    const Outcome check = run_cfg(cfg, SearchBackend{});
    REQUIRE(check.code == kVerified);
    json a = json::parse(full.out)["check"], b = json::parse(check.out)["check"];
    zero_times(a);
    zero_times(b);
    INFO(name);
    CHECK(a == b);
  }
}

TEST_CASE("modes that search need the search module") {
  RunConfig cfg;
  cfg.corpus_name = "x-minus-2";
  const Outcome o = run_cfg(cfg, SearchBackend{});
  CHECK(o.code == kUsage);
  CHECK(o.err.find("search module") != std::string::npos);
}

TEST_CASE("annotate mode writes a replayable certificate") {
  TempDir dir;
  RunConfig cfg;
  cfg.corpus_name = "two-variable";
  cfg.cert = dir.file("c.cert");
  cfg.mode = Mode::search_only;
  REQUIRE(run_cfg(cfg).code == kVerified);
  cfg.mode = Mode::annotate;
  cfg.out = dir.file("a.cert");
  REQUIRE(run_cfg(cfg).code == kVerified);
  const std::string annotated = slurp(cfg.out);
  CHECK(annotated.find('@') != std::string::npos);
  cfg.mode = Mode::check_only;
  cfg.cert = cfg.out;
  cfg.report = ReportFormat::machine;
  const Outcome o = run_cfg(cfg, SearchBackend{});
  CHECK(o.code == kVerified);
  CHECK(json::parse(o.out)["check"]["max_precision"].get<int>() <= 5);
}

TEST_CASE("tampered certificate files are rejected") {
  TempDir dir;
  RunConfig cfg;
  cfg.corpus_name = "x-minus-2";
  cfg.mode = Mode::check_only;
  cfg.cert = dir.file("t.cert", "[r1]: MONO[1+]{PASS*}\n[l1]: MONO[1+]{REF(1)}\n[]: GLUE(1,0){REF(1),REF(0)}\n");
  cfg.report = ReportFormat::machine;
  const Outcome o = run_cfg(cfg, SearchBackend{});
  CHECK(o.code == kRejected);
  CHECK(json::parse(o.out)["check"]["failure"]["entry"] == 1);
  cfg.cert = dir.file("u.cert", "[]: GLUE(1,0){PASS\n");
  CHECK(run_cfg(cfg, SearchBackend{}).code == kUsage);
}

TEST_CASE("audit file lists every rule application") {
  TempDir dir;
  RunConfig cfg;
  cfg.corpus_name = "x-minus-2";
  cfg.force_split = 1;
  cfg.mono_first = true;
  cfg.audit = dir.file("audit.log");
  REQUIRE(run_cfg(cfg).code == kVerified);
  std::istringstream in(slurp(cfg.audit));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    CHECK(line.size() > 10);
    CHECK(line.substr(line.size() - 8) == "verified");
  }
  CHECK(lines == 7);
}

TEST_CASE("machine report schema matches the golden file") {
  RunConfig cfg;
  cfg.corpus_name = "x-minus-2";
  cfg.force_split = 1;
  cfg.mono_first = true;
  cfg.report = ReportFormat::machine;
  const Outcome o = run_cfg(cfg);
  REQUIRE(o.code == kVerified);
  json j = json::parse(o.out);
  zero_times(j);
  const json golden = json::parse(slurp(NLV_GOLDEN_DIR "/x-minus-2.report.json"));
  CHECK(j == golden);
  // Key order is part of the schema.
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  const auto ordered = nlohmann::ordered_json::parse(o.out);
  std::vector<std::string> order;
  for (auto it = ordered.begin(); it != ordered.end(); ++it) order.push_back(it.key());
  CHECK(order == std::vector<std::string>{"problem", "dimension", "mode", "status", "exit_code", "precision", "search",
                                          "certificate", "check", "counterexample", "total_seconds"});
}

TEST_CASE("text report rows") {
  RunConfig cfg;
  cfg.corpus_name = "schwefel";
  const Outcome o = run_cfg(cfg);
  CHECK(o.code == kVerified);
  CHECK(o.out.rfind("problem         schwefel (3 variables)\nstatus          verified\n", 0) == 0);
  CHECK(o.out.find("checker         accepted at base 200, digits 5") != std::string::npos);
}

TEST_CASE("corpus names are unique and expectations are set") {
  std::set<std::string> names;
  int benchmarks = 0;
  for (const auto& e : corpus()) {
    CHECK(names.insert(e.name).second);
    CHECK(e.problem.dimension() >= 1);
    benchmarks += e.benchmark;
  }
  CHECK(benchmarks >= 7);
  for (const char* n : {"schwefel", "caprasse", "magnetism", "heart", "two-variable", "4717061266", "7067938795",
                        "3318775219"})
    CHECK(find_corpus_entry(n).has_value());
  CHECK_FALSE(find_corpus_entry("nope").has_value());
  CHECK(find_corpus_entry("3318775219")->expected == Expected::refuted);
  CHECK(find_corpus_entry("4717061266")->expected == Expected::verified);
}

TEST_CASE("caprasse box is [-0.5, 0.5]^4") {
  const auto e = find_corpus_entry("caprasse");
  REQUIRE(e);
  REQUIRE(e->problem.dimension() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(e->problem.lower[i].value() == mpq_class(-1, 2));
    CHECK(e->problem.upper[i].value() == mpq_class(1, 2));
  }
}

TEST_CASE("delta at the regular tetrahedron") {
  CHECK(exact_value(delta(constants({4, 4, 4, 4, 4, 4}))) == 128);
  CHECK(exact_value(delta(constants({1, 1, 1, 1, 1, 1}))) == 2);
}

TEST_CASE("delta4 matches its expanded form") {
  // The partial in x4, expanded by hand.
  const std::vector<std::string> names{"x1", "x2", "x3", "x4", "x5", "x6"};
  const expr::Expr by_hand = expr::parse_expression(
      "-x2*x3 - x1*x4 + x2*x5 + x3*x6 - x5*x6 + x1*(-x1 + x2 + x3 - x4 + x5 + x6)", names);
  std::mt19937_64 rng(73);
  std::vector<expr::Expr> vars;
  for (int i = 0; i < 6; ++i) vars.push_back(expr::variable(i));
  const expr::Expr d4 = delta4(vars);
  for (int k = 0; k < 50; ++k) {
    std::vector<expr::Expr> point;
    for (int i = 0; i < 6; ++i) point.push_back(expr::constant(static_cast<long>(rng() % 41) - 20));
    CHECK(exact_value(expr::substitute(d4, point)) == exact_value(expr::substitute(by_hand, point)));
  }
}

TEST_CASE("dih_x at the regular tetrahedron is acos(1/3)") {
  const expr::Expr d = dih_x(constants({4, 4, 4, 4, 4, 4}));
  const numeric::RigorousArith a({200, 8}, false);
  const auto [lo, hi] = testing::mpfr_bounds(testing::Fn::acos, mpq_class(1, 3));
  // Evaluate the constant expression with the rigorous tier.
  expr::Problem p;
  p.names = {"t"};
  p.lower = {expr::constant(0)};
  p.upper = {expr::constant(1)};
  p.goal = d;
  const taylor::CompiledProblem cp(p);
  const taylor::Evaluator<numeric::RigorousArith> ev(cp, a);
  const numeric::Interval v = ev.value({a.hull(a.zero(), a.zero())});
  CHECK(v.lo.to_rational() <= hi);
  CHECK(v.hi.to_rational() >= lo);
  CHECK((v.hi.to_rational() - v.lo.to_rational()) < mpq_class(1, 1000000000));
  // dih_y at edge lengths 2 is the same angle.
  p.goal = dih_y(constants({2, 2, 2, 2, 2, 2}));
  const taylor::CompiledProblem cpy(p);
  const taylor::Evaluator<numeric::RigorousArith> evy(cpy, a);
  const numeric::Interval w = evy.value({a.hull(a.zero(), a.zero())});
  CHECK(w.lo.to_rational() <= hi);
  CHECK(w.hi.to_rational() >= lo);
}

TEST_CASE("printed corpus problems parse back") {
  for (const auto& e : corpus()) {
    INFO(e.name);
    CHECK(expr::structurally_equal(expr::parse_problem(expr::to_string(e.problem)), e.problem));
  }
}

TEST_CASE("corpus files match the built-in problems") {
  std::set<std::string> files;
  for (const auto& f : fs::directory_iterator(NLV_CORPUS_DIR))
    if (f.path().extension() == ".nlv") files.insert(f.path().stem().string());
  std::set<std::string> names;
  for (const auto& e : corpus()) {
    INFO(e.name);
    names.insert(e.name);
    std::ifstream in(std::string(NLV_CORPUS_DIR) + "/" + e.name + ".nlv");
    REQUIRE(in);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(expr::structurally_equal(expr::parse_problem(text.str()), e.problem));
  }
  CHECK(files == names);
}

}  // TEST_SUITE
