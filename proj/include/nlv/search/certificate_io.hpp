#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "nlv/search/certificate.hpp"

namespace nlv::search {

/// Text form of certificates. One entry per line:
///
///   # nlverify certificate v1
///   [r1]: MONO[1+]{PASS}
///   [l1]: MONO[1+]{REF(0)}
///   []: GLUE(1,0){REF(1),REF(0)}
///
/// Node grammar (coordinates are 1-based):
///   node   := tag annot? body?
///   tag    := FALSE | PASS | PASS* | MONO[j±,...] | GLUE(j,c) | PASSMONO(j±) | REF(k)
///   annot  := @digits
///   body   := {node} for MONO, {node,node} for GLUE
/// PASS* marks a pass by direct interval evaluation. Path steps are l, r
/// (split halves) and ml, mr (lo and hi faces) followed by the coordinate.
class CertificateFormatError : public std::runtime_error {
 public:
  CertificateFormatError(const std::string& message, std::size_t line);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

std::string to_text(const Tree& t);
std::string to_text(const Path& p);
std::string to_text(const CertificateList& list);

Tree parse_tree(std::string_view text);
Path parse_path(std::string_view text);
CertificateList parse_certificate(std::string_view text);

}  // namespace nlv::search
