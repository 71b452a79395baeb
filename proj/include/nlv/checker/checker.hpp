#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlv/numeric/rigorous.hpp"
#include "nlv/search/box.hpp"
#include "nlv/search/certificate.hpp"
#include "nlv/taylor/taylor.hpp"

namespace nlv::checker {

using search::Box;
using search::CertificateList;
using search::MonoStatus;
using search::Path;
using search::Tree;

class Checker;
class Replay;

struct CheckOptions {
  numeric::Precision precision;
  /// Replay each node at its annotated digit count when it has one.
  bool use_annotations = true;
  bool use_cache = true;
  /// Threads for the parallel replay; 1 replays serially.
  int workers = 1;
  /// Keep the rendered audit log in the report.
  bool audit = false;
  /// Glue children above this depth become parallel tasks.
  int task_depth = 14;
};

/// The statement "goal < 0 on every point of box". Only the checker's rules
/// create facts.
class VerifiedFact {
 public:
  const Box& box() const { return box_; }
  int precision() const { return precision_; }
  std::size_t nodes() const { return nodes_; }

 private:
  friend class Checker;
  friend class Replay;
  VerifiedFact(Box box, int precision, std::size_t nodes)
      : box_(std::move(box)), precision_(precision), nodes_(nodes) {}
  Box box_;
  int precision_;
  std::size_t nodes_;
};

/// A rule whose side condition did not hold.
class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Rule : unsigned char { pass, pass_direct, mono, glue_split, glue_convex, ref, structure };

const char* to_string(Rule r);

struct RuleCounts {
  std::size_t pass = 0, pass_direct = 0, mono = 0, glue_split = 0, glue_convex = 0, ref = 0;
  std::size_t total() const { return pass + pass_direct + mono + glue_split + glue_convex + ref; }
  friend bool operator==(const RuleCounts&, const RuleCounts&) = default;
};

struct CheckReport {
  bool accepted = false;
  /// The fact on the root box when accepted.
  std::optional<VerifiedFact> fact;
  std::size_t entries = 0;
  /// Failing entry index and the path from the root box to the failing node.
  std::size_t failed_entry = 0;
  Path failed_path;
  std::string failure;
  RuleCounts counts;
  int max_precision = 0;
  double seconds = 0;
  /// Lines "RULE box digits outcome" in replay order, when requested.
  std::vector<std::string> audit;
};

/// Rigorous replay of certificates for one problem.
class Checker {
 public:
  Checker(const taylor::CompiledProblem& problem, CheckOptions options);

  const Box& root() const { return root_; }
  const CheckOptions& options() const { return options_; }
  const taylor::CompiledProblem& problem() const { return *problem_; }

  // The four rules. Each throws CheckFailure when its side condition fails.

  /// goal < 0 on box by direct evaluation (direct) or by the Taylor bound
  /// with a direct fallback.
  VerifiedFact check_pass(const Box& box, bool direct, int digits) const;
  /// Lifts a fact on the face selected by `statuses` to the whole box after
  /// re-verifying each gradient sign (strict for decreasing).
  VerifiedFact check_mono(const Box& box, const std::vector<MonoStatus>& statuses, const VerifiedFact& inner,
                          int digits) const;
  /// Joins facts on the two halves of box along j, or on its two faces along
  /// j after re-verifying convexity in x_j.
  VerifiedFact check_glue(const Box& box, int j, bool convex, const VerifiedFact& left, const VerifiedFact& right,
                          int digits) const;
  VerifiedFact check_ref(const Box& box, const VerifiedFact& earlier) const;

  CheckReport check_list(const CertificateList& list) const;
  CheckReport check_list_serial(const CertificateList& list) const;
  CheckReport check_list_parallel(const CertificateList& list) const;

  // Side conditions alone, for annotation.
  bool pass_holds(const Box& box, bool direct, int digits, std::string* why = nullptr) const;
  bool mono_holds(const Box& box, const std::vector<MonoStatus>& statuses, int digits,
                  std::string* why = nullptr) const;
  bool convex_holds(const Box& box, int j, int digits, std::string* why = nullptr) const;

 private:
  using Eval = taylor::Evaluator<numeric::RigorousArith>;
  const Eval& evaluator(int digits) const;
  friend class Replay;

  const taylor::CompiledProblem* problem_;
  CheckOptions options_;
  Box root_;
  mutable std::mutex eval_mutex_;
  mutable std::map<int, std::unique_ptr<Eval>> evaluators_;
};

/// Per node, the smallest digit count in 1..max_digits at which its rule
/// holds (direct evaluation is tried first for pass nodes and sets the
/// direct flag). Nodes that hold at no smaller count get max_digits.
CertificateList annotate_adaptive(const Checker& checker, const CertificateList& list, int max_digits);

/// Machine-readable one-line failure location, e.g. "entry 2 [l1,mr2]".
std::string failure_location(const CheckReport& r);

}  // namespace nlv::checker
