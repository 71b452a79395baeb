#include "nlv/search/certificate_io.hpp"

#include <cctype>
#include <charconv>

namespace nlv::search {

CertificateFormatError::CertificateFormatError(const std::string& message, std::size_t line)
    : std::runtime_error(line > 0 ? "certificate line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

namespace {

char sign_char(Direction d) { return d == Direction::increasing ? '+' : '-'; }

const char* side_text(Side s) {
  switch (s) {
    case Side::left: return "l";
    case Side::right: return "r";
    case Side::lo_face: return "ml";
    case Side::hi_face: return "mr";
  }
  return "?";
}

void write(const Tree& t, std::string& out) {
  switch (t->kind) {
    case NodeKind::fail: out += "FALSE"; break;
    case NodeKind::pass: out += t->direct ? "PASS*" : "PASS"; break;
    case NodeKind::ref: out += "REF(" + std::to_string(t->ref) + ")"; break;
    case NodeKind::pass_mono:
      out += "PASSMONO(" + std::to_string(t->statuses.front().coord + 1) + sign_char(t->statuses.front().dir) + ")";
      break;
    case NodeKind::mono:
      out += "MONO[";
      for (std::size_t i = 0; i < t->statuses.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(t->statuses[i].coord + 1);
        out += sign_char(t->statuses[i].dir);
      }
      out += ']';
      break;
    case NodeKind::glue:
      out += "GLUE(" + std::to_string(t->coord + 1) + "," + (t->convex ? "1" : "0") + ")";
      break;
  }
  if (t->precision > 0) out += "@" + std::to_string(t->precision);
  if (t->children.empty()) return;
  out += '{';
  for (std::size_t i = 0; i < t->children.size(); ++i) {
    if (i > 0) out += ',';
    write(t->children[i], out);
  }
  out += '}';
}

class Reader {
 public:
  Reader(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  Tree tree() {
    Tree t = node();
    skip_space();
    if (pos_ != s_.size()) fail("trailing characters");
    return t;
  }

  Path path() {
    Path p;
    expect('[');
    skip_space();
    if (peek() == ']') {
      ++pos_;
      return p;
    }
    for (;;) {
      skip_space();
      PathStep step;
      if (accept("ml")) step.side = Side::lo_face;
      else if (accept("mr")) step.side = Side::hi_face;
      else if (accept("l")) step.side = Side::left;
      else if (accept("r")) step.side = Side::right;
      else fail("expected a path step (l, r, ml, mr)");
      step.coord = coordinate();
      p.push_back(step);
      skip_space();
      if (peek() == ']') {
        ++pos_;
        return p;
      }
      expect(',');
    }
  }

  std::size_t position() const { return pos_; }
  std::string_view rest() const { return s_.substr(pos_); }
  void expect(char c) {
    skip_space();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw CertificateFormatError(msg + " at column " + std::to_string(pos_ + 1), line_);
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(std::string_view word) {
    if (s_.substr(pos_, word.size()) != word) return false;
    pos_ += word.size();
    return true;
  }
  long number() {
    skip_space();
    long v = 0;
    const char* first = s_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
    if (ec != std::errc() || ptr == first) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }
  int coordinate() {
    const long v = number();
    if (v < 1 || v > 1'000'000) fail("coordinate must be a positive index");
    return static_cast<int>(v - 1);
  }
  MonoStatus status() {
    MonoStatus st;
    st.coord = coordinate();
    if (peek() == '+') st.dir = Direction::increasing;
    else if (peek() == '-') st.dir = Direction::decreasing;
    else fail("expected '+' or '-'");
    ++pos_;
    return st;
  }
  int annotation() {
    if (peek() != '@') return 0;
    ++pos_;
    const long v = number();
    if (v < 1 || v > 100000) fail("precision annotation out of range");
    return static_cast<int>(v);
  }
  Tree node() {
    skip_space();
    if (accept("FALSE")) return ResultTree::fail();
    if (accept("PASSMONO")) {
      expect('(');
      const MonoStatus st = status();
      expect(')');
      return ResultTree::pass_mono(st);
    }
    if (accept("PASS")) {
      const bool direct = peek() == '*';
      if (direct) ++pos_;
      return ResultTree::pass(direct, annotation());
    }
    if (accept("REF")) {
      expect('(');
      const long k = number();
      if (k < 0) fail("negative reference");
      expect(')');
      return ResultTree::reference(static_cast<std::size_t>(k));
    }
    if (accept("MONO")) {
      expect('[');
      std::vector<MonoStatus> statuses;
      skip_space();
      if (peek() != ']') {
        for (;;) {
          statuses.push_back(status());
          skip_space();
          if (peek() != ',') break;
          ++pos_;
        }
      }
      expect(']');
      const int prec = annotation();
      expect('{');
      Tree child = node();
      expect('}');
      return ResultTree::mono(std::move(statuses), std::move(child), prec);
    }
    if (accept("GLUE")) {
      expect('(');
      const int j = coordinate();
      expect(',');
      const long c = number();
      if (c != 0 && c != 1) fail("convex flag must be 0 or 1");
      expect(')');
      const int prec = annotation();
      expect('{');
      Tree left = node();
      expect(',');
      Tree right = node();
      expect('}');
      return ResultTree::glue(j, c == 1, std::move(left), std::move(right), prec);
    }
    fail("unknown node tag");
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_text(const Tree& t) {
  std::string out;
  write(t, out);
  return out;
}

std::string to_text(const Path& p) {
  std::string out = "[";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i > 0) out += ',';
    out += side_text(p[i].side);
    out += std::to_string(p[i].coord + 1);
  }
  return out + "]";
}

std::string to_text(const CertificateList& list) {
  std::string out = "# nlverify certificate v1\n";
  for (const CertificateEntry& e : list) {
    out += to_text(e.path);
    out += ": ";
    write(e.tree, out);
    out += '\n';
  }
  return out;
}

Tree parse_tree(std::string_view text) { return Reader(text, 0).tree(); }

Path parse_path(std::string_view text) {
  Reader r(text, 0);
  Path p = r.path();
  if (r.rest().find_first_not_of(" \t\r") != std::string_view::npos)
    throw CertificateFormatError("trailing characters after path", 0);
  return p;
}

CertificateList parse_certificate(std::string_view text) {
  CertificateList list;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') {
      if (end == text.size()) break;
      continue;
    }
    Reader r(line, line_no);
    CertificateEntry entry;
    entry.path = r.path();
    r.expect(':');
    entry.tree = Reader(r.rest(), line_no).tree();
    list.push_back(std::move(entry));
    if (end == text.size()) break;
  }
  if (list.empty()) throw CertificateFormatError("no certificate entries", 0);
  return list;
}

}  // namespace nlv::search
