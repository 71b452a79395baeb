#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlv/search/box.hpp"
#include "nlv/search/certificate.hpp"
#include "nlv/taylor/taylor.hpp"

namespace nlv::cli {

enum class Mode { full, search_only, check_only, annotate };
enum class ReportFormat { text, machine };

enum ExitCode : int { kVerified = 0, kRejected = 1, kUsage = 2, kInconclusive = 3 };

struct RunConfig {
  int digits = 5;
  int base = 200;
  int max_depth = 80;
  Mode mode = Mode::full;
  /// Problem file; empty when a corpus entry is named instead.
  std::string input;
  std::string corpus_name;
  /// Certificate written by full and search-only runs, read by check-only and annotate.
  std::string cert;
  /// Annotated certificate written by annotate mode.
  std::string out;
  /// Audit log destination for the checker.
  std::string audit;
  ReportFormat report = ReportFormat::text;
  int workers = 1;
  bool use_cache = true;
  /// Split unconditionally above this depth.
  int force_split = 0;
  bool mono_first = false;
  /// Annotate before checking in full mode.
  bool annotate = false;
};

/// Returns an empty string when valid, otherwise the problem.
std::string validate(const RunConfig& cfg);

struct SearchRequest {
  int max_depth = 80;
  int min_split_depth = 0;
  bool mono_first = false;
  int workers = 1;
};

struct SearchResult {
  enum class Status { verified, refuted, inconclusive } status = Status::inconclusive;
  search::CertificateList certificate;  // when verified
  search::Box witness;                  // when not verified
  std::size_t nodes = 0;
  int depth = 0;
  /// Set when the PassMono-free fallback produced the certificate.
  bool fallback = false;
};

/// Search plus transform. Binaries built without the search module pass an
/// empty backend; modes that need it then fail with a usage error.
using SearchBackend = std::function<SearchResult(const taylor::CompiledProblem&, const search::Box&, const SearchRequest&)>;

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err, const SearchBackend& backend);

/// Parses argv into a config and runs it. Handles --help, --list-corpus and
/// --print-problem.
int main_with_args(int argc, char** argv, const SearchBackend& backend);

}  // namespace nlv::cli
