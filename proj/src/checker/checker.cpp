#include "nlv/checker/checker.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <tuple>
#include <unordered_map>

#include "nlv/search/certificate_io.hpp"

namespace nlv::checker {

using numeric::DomainError;
using numeric::Interval;
using numeric::RigorousArith;
using search::NodeKind;
using search::ResultTree;
using search::Side;

const char* to_string(Rule r) {
  switch (r) {
    case Rule::pass: return "PASS";
    case Rule::pass_direct: return "PASS*";
    case Rule::mono: return "MONO";
    case Rule::glue_split: return "GLUE";
    case Rule::glue_convex: return "GLUE_CONVEX";
    case Rule::ref: return "REF";
    case Rule::structure: return "STRUCTURE";
  }
  return "?";
}

Checker::Checker(const taylor::CompiledProblem& problem, CheckOptions options)
    : problem_(&problem), options_(options), root_(search::root_box(problem.problem, options.precision)) {}

const Checker::Eval& Checker::evaluator(int digits) const {
  std::lock_guard<std::mutex> lock(eval_mutex_);
  auto& slot = evaluators_[digits];
  if (!slot)
    slot = std::make_unique<Eval>(*problem_,
                                  RigorousArith({options_.precision.base, digits}, options_.use_cache));
  return *slot;
}

namespace {

std::vector<Interval> box_hull(const Box& box, const RigorousArith& a) {
  std::vector<Interval> iv;
  iv.reserve(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) iv.push_back(a.hull(box.lo[i], box.hi[i]));
  return iv;
}

void set(std::string* why, std::string text) {
  if (why) *why = std::move(text);
}

bool sign_confirmed(const Interval& g, search::Direction d) {
  return d == search::Direction::increasing ? g.lo.sign() >= 0 : g.hi.sign() < 0;
}

}  // namespace

bool Checker::pass_holds(const Box& box, bool direct, int digits, std::string* why) const {
  const Eval& ev = evaluator(digits);
  const RigorousArith& a = ev.arith;
  auto direct_ok = [&] {
    try {
      const Interval v = ev.value(box_hull(box, a));
      if (v.hi.sign() < 0) return true;
      set(why, "direct upper bound " + v.hi.to_string() + " is not negative");
    } catch (const DomainError& e) {
      set(why, std::string("direct evaluation: ") + e.what());
    }
    return false;
  };
  if (direct) return direct_ok();
  try {
    const auto ti = taylor::make_taylor_interval(ev, taylor::make_domain(box.lo, box.hi, a));
    if (taylor::taylor_upper_bound(ti, a).sign() < 0) return true;
  } catch (const DomainError&) {
  }
  if (direct_ok()) return true;
  if (why) *why = "neither the Taylor bound nor the " + *why;
  return false;
}

bool Checker::mono_holds(const Box& box, const std::vector<MonoStatus>& statuses, int digits,
                         std::string* why) const {
  const int n = problem_->dimension();
  for (std::size_t i = 0; i < statuses.size(); ++i) {
    if (statuses[i].coord < 0 || statuses[i].coord >= n) {
      set(why, "monotone coordinate out of range");
      return false;
    }
    if (i > 0 && statuses[i - 1].coord >= statuses[i].coord) {
      set(why, "monotone coordinates must be ascending");
      return false;
    }
  }
  if (statuses.empty()) return true;
  const Eval& ev = evaluator(digits);
  const RigorousArith& a = ev.arith;
  std::optional<std::vector<Interval>> grad;
  try {
    grad = ev.gradient(box_hull(box, a));
    if (std::all_of(statuses.begin(), statuses.end(),
                    [&](const MonoStatus& s) { return sign_confirmed((*grad)[static_cast<std::size_t>(s.coord)], s.dir); }))
      return true;
  } catch (const DomainError&) {
  }
  std::optional<taylor::TaylorInterval<RigorousArith>> ti;
  try {
    ti = taylor::make_taylor_interval(ev, taylor::make_domain(box.lo, box.hi, a));
  } catch (const DomainError&) {
  }
  for (const MonoStatus& s : statuses) {
    std::optional<Interval> g;
    if (grad) g = (*grad)[static_cast<std::size_t>(s.coord)];
    if (ti) {
      const Interval t = taylor::bound_gradient(*ti, s.coord, a);
      g = g ? Interval{numeric::max(g->lo, t.lo), numeric::min(g->hi, t.hi)} : t;
    }
    if (!g) {
      set(why, "gradient evaluation left its domain");
      return false;
    }
    if (!sign_confirmed(*g, s.dir)) {
      set(why, "partial " + std::to_string(s.coord + 1) + " enclosure [" + g->lo.to_string() + ", " +
                   g->hi.to_string() + "] does not confirm " +
                   (s.dir == search::Direction::increasing ? "f_j >= 0" : "f_j < 0"));
      return false;
    }
  }
  return true;
}

bool Checker::convex_holds(const Box& box, int j, int digits, std::string* why) const {
  if (j < 0 || j >= problem_->dimension()) {
    set(why, "convexity coordinate out of range");
    return false;
  }
  const Eval& ev = evaluator(digits);
  try {
    const auto h = ev.hessian(box_hull(box, ev.arith));
    const Interval& djj = h[expr::PartialTable::tri(j, j)];
    if (djj.lo.sign() >= 0) return true;
    set(why, "second partial " + std::to_string(j + 1) + " lower bound " + djj.lo.to_string() + " is negative");
  } catch (const DomainError& e) {
    set(why, std::string("second partial evaluation: ") + e.what());
  }
  return false;
}

VerifiedFact Checker::check_pass(const Box& box, bool direct, int digits) const {
  std::string why;
  if (!pass_holds(box, direct, digits, &why)) throw CheckFailure(why);
  return VerifiedFact(box, digits, 1);
}

VerifiedFact Checker::check_mono(const Box& box, const std::vector<MonoStatus>& statuses, const VerifiedFact& inner,
                                 int digits) const {
  std::string why;
  if (!mono_holds(box, statuses, digits, &why)) throw CheckFailure(why);
  Box face = box;
  for (const MonoStatus& s : statuses) face = search::restrict_box(face, s.coord, search::face_of(s.dir));
  if (!search::subset(face, inner.box())) throw CheckFailure("inner fact does not cover the monotone face");
  return VerifiedFact(box, std::max(digits, inner.precision()), inner.nodes() + 1);
}

VerifiedFact Checker::check_glue(const Box& box, int j, bool convex, const VerifiedFact& left,
                                 const VerifiedFact& right, int digits) const {
  std::string why;
  Box lb, rb;
  try {
    if (convex) {
      if (!convex_holds(box, j, digits, &why)) throw CheckFailure(why);
      lb = search::restrict_box(box, j, Side::lo_face);
      rb = search::restrict_box(box, j, Side::hi_face);
    } else {
      std::tie(lb, rb) = search::split_box(box, j);
    }
  } catch (const search::GeometryError& e) {
    throw CheckFailure(e.what());
  }
  if (!search::subset(lb, left.box()) || !search::subset(rb, right.box()))
    throw CheckFailure("child facts do not cover the two parts of the box");
  return VerifiedFact(box, std::max({convex ? digits : 0, left.precision(), right.precision()}),
                      left.nodes() + right.nodes() + 1);
}

VerifiedFact Checker::check_ref(const Box& box, const VerifiedFact& earlier) const {
  if (!search::subset(box, earlier.box())) throw CheckFailure("referenced box does not contain this box");
  return VerifiedFact(box, 0, 1);
}

// Replay of a certificate list. Serial and parallel runs share this code; the
// parallel run keeps every record and trims after the first failure in
// (entry, preorder) order, which is exactly what the serial run produces.
class Replay {
 public:
  Replay(const Checker& c, const CertificateList& list, bool parallel)
      : c_(c), list_(list), parallel_(parallel), threads_(parallel ? std::max(1, c.options().workers) : 1) {}

  CheckReport run() {
    const auto start = std::chrono::steady_clock::now();
    records_.assign(static_cast<std::size_t>(threads_), {});
    for (const auto& e : list_) size_of(e.tree);
    prepare_boxes();
    facts_.resize(list_.size());
    if (parallel_) {
#pragma omp parallel num_threads(threads_)
#pragma omp single
      for (std::size_t i = 0; i < list_.size(); ++i) {
#pragma omp task firstprivate(i)
        run_entry(i);
      }
    } else {
      for (std::size_t i = 0; i < list_.size() && !failed_any(); ++i) run_entry(i);
    }
    CheckReport r = finish();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }

 private:
  struct Record {
    std::size_t entry, index;
    Rule rule;
    int digits;
    bool ok;
    std::string box;
  };
  struct Failure {
    std::size_t entry, index;
    Path path;
    std::string message;
  };

  std::size_t size_of(const Tree& t) {
    if (auto it = sizes_.find(t.get()); it != sizes_.end()) return it->second;
    std::size_t n = 1;
    for (const Tree& ch : t->children) n += size_of(ch);
    sizes_[t.get()] = n;
    return n;
  }

  void prepare_boxes() {
    boxes_.resize(list_.size());
    for (std::size_t i = 0; i < list_.size(); ++i) {
      try {
        boxes_[i] = search::apply_path(c_.root(), list_[i].path);
      } catch (const search::GeometryError&) {
      }
    }
  }

  bool failed_any() const { return first_failed_entry_.load() != kNone; }

  int digits_of(const Tree& t) const {
    return c_.options().use_annotations && t->precision > 0 ? t->precision : c_.options().precision.digits;
  }

  void record(std::size_t entry, std::size_t index, Rule rule, int digits, bool ok, const Box& box) {
    const auto t = static_cast<std::size_t>(parallel_ ? omp_get_thread_num() : 0);
    records_[t].push_back({entry, index, rule, digits, ok, c_.options().audit ? search::to_string(box) : std::string()});
  }

  std::nullopt_t fail(std::size_t entry, std::size_t index, const Path& path, Rule rule, int digits, const Box& box,
                      std::string message) {
    record(entry, index, rule, digits, false, box);
    std::lock_guard<std::mutex> lock(mutex_);
    failures_.push_back({entry, index, path, std::move(message)});
    for (std::size_t seen = first_failed_entry_.load(); entry < seen;)
      if (first_failed_entry_.compare_exchange_weak(seen, entry)) break;
    return std::nullopt;
  }

  void run_entry(std::size_t i) {
    if (i > first_failed_entry_.load()) return;
    const auto& entry = list_[i];
    Path path = entry.path;
    if (i + 1 == list_.size() && !entry.path.empty()) {
      fail(i, 0, path, Rule::structure, 0, c_.root(), "the last entry must have the empty path");
      return;
    }
    for (const auto& s : entry.path) {
      if (s.coord < 0 || s.coord >= c_.problem().dimension()) {
        fail(i, 0, path, Rule::structure, 0, c_.root(), "path coordinate out of range");
        return;
      }
    }
    if (boxes_[i].size() != c_.root().size()) {
      fail(i, 0, path, Rule::structure, 0, c_.root(), "path splits a degenerate coordinate");
      return;
    }
    facts_[i] = visit(i, entry.tree, boxes_[i], 0, path, 0);
  }

  std::optional<VerifiedFact> visit(std::size_t entry, const Tree& t, const Box& box, std::size_t index, Path& path,
                                    int depth) {
    if (entry > first_failed_entry_.load()) return std::nullopt;
    const int digits = digits_of(t);
    std::string why;
    switch (t->kind) {
      case NodeKind::fail:
        return fail(entry, index, path, Rule::structure, 0, box, "FALSE node cannot be replayed");
      case NodeKind::pass_mono:
        return fail(entry, index, path, Rule::structure, 0, box, "unresolved PASSMONO node");
      case NodeKind::ref: {
        if (t->ref >= entry)
          return fail(entry, index, path, Rule::ref, 0, box, "REF(" + std::to_string(t->ref) + ") is not an earlier entry");
        const Box& target = boxes_[t->ref];
        if (target.size() != box.size() || !search::subset(box, target))
          return fail(entry, index, path, Rule::ref, 0, box,
                      "REF(" + std::to_string(t->ref) + ") box does not contain this box");
        record(entry, index, Rule::ref, 0, true, box);
        return VerifiedFact(box, 0, 1);
      }
      case NodeKind::pass: {
        const Rule rule = t->direct ? Rule::pass_direct : Rule::pass;
        if (!t->children.empty()) return fail(entry, index, path, rule, digits, box, "PASS node with children");
        if (!c_.pass_holds(box, t->direct, digits, &why)) return fail(entry, index, path, rule, digits, box, why);
        record(entry, index, rule, digits, true, box);
        return VerifiedFact(box, digits, 1);
      }
      case NodeKind::mono: {
        if (t->children.size() != 1) return fail(entry, index, path, Rule::mono, digits, box, "MONO needs one child");
        if (!c_.mono_holds(box, t->statuses, digits, &why))
          return fail(entry, index, path, Rule::mono, digits, box, why);
        record(entry, index, Rule::mono, digits, true, box);
        Box face = box;
        const std::size_t mark = path.size();
        for (const MonoStatus& s : t->statuses) {
          face = search::restrict_box(face, s.coord, search::face_of(s.dir));
          path.push_back({search::face_of(s.dir), s.coord});
        }
        auto inner = visit(entry, t->children[0], face, index + 1, path, depth);
        path.resize(mark);
        if (!inner) return std::nullopt;
        return VerifiedFact(box, std::max(digits, inner->precision()), inner->nodes() + 1);
      }
      case NodeKind::glue: {
        const Rule rule = t->convex ? Rule::glue_convex : Rule::glue_split;
        if (t->children.size() != 2) return fail(entry, index, path, rule, digits, box, "GLUE needs two children");
        if (t->coord < 0 || t->coord >= c_.problem().dimension())
          return fail(entry, index, path, rule, digits, box, "GLUE coordinate out of range");
        Box lb, rb;
        if (t->convex) {
          if (!c_.convex_holds(box, t->coord, digits, &why)) return fail(entry, index, path, rule, digits, box, why);
          lb = search::restrict_box(box, t->coord, Side::lo_face);
          rb = search::restrict_box(box, t->coord, Side::hi_face);
        } else {
          if (!(box.lo[static_cast<std::size_t>(t->coord)] < box.hi[static_cast<std::size_t>(t->coord)]))
            return fail(entry, index, path, rule, digits, box, "cannot split a degenerate coordinate");
          std::tie(lb, rb) = search::split_box(box, t->coord);
        }
        const int used = t->convex ? digits : 0;
        record(entry, index, rule, used, true, box);
        const Side ls = t->convex ? Side::lo_face : Side::left;
        const Side rs = t->convex ? Side::hi_face : Side::right;
        const std::size_t li = index + 1;
        const std::size_t ri = li + sizes_.at(t->children[0].get());
        std::optional<VerifiedFact> l, r;
        if (parallel_ && depth < c_.options().task_depth) {
          Path lpath = path;
          lpath.push_back({ls, t->coord});
#pragma omp task shared(l) firstprivate(lpath, entry, depth, li) default(shared)
          l = visit(entry, t->children[0], lb, li, lpath, depth + 1);
          path.push_back({rs, t->coord});
          r = visit(entry, t->children[1], rb, ri, path, depth + 1);
          path.pop_back();
#pragma omp taskwait
        } else {
          path.push_back({ls, t->coord});
          l = visit(entry, t->children[0], lb, li, path, depth + 1);
          if (l) {
            path.back() = {rs, t->coord};
            r = visit(entry, t->children[1], rb, ri, path, depth + 1);
          }
          path.pop_back();
        }
        if (!l || !r) return std::nullopt;
        return VerifiedFact(box, std::max({used, l->precision(), r->precision()}), l->nodes() + r->nodes() + 1);
      }
    }
    return fail(entry, index, path, Rule::structure, 0, box, "unknown node");
  }

  CheckReport finish() {
    CheckReport r;
    r.entries = list_.size();
    std::vector<Record> all;
    for (auto& v : records_) {
      all.insert(all.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
    }
    std::sort(all.begin(), all.end(), [](const Record& a, const Record& b) {
      return std::tie(a.entry, a.index) < std::tie(b.entry, b.index);
    });
    if (!failures_.empty()) {
      const Failure& f = *std::min_element(failures_.begin(), failures_.end(), [](const Failure& a, const Failure& b) {
        return std::tie(a.entry, a.index) < std::tie(b.entry, b.index);
      });
      r.failed_entry = f.entry;
      r.failed_path = f.path;
      r.failure = f.message;
      all.erase(std::find_if(all.begin(), all.end(),
                             [&](const Record& x) { return std::tie(x.entry, x.index) > std::tie(f.entry, f.index); }),
                all.end());
    } else if (list_.empty()) {
      r.failure = "empty certificate list";
    } else {
      r.accepted = true;
      r.fact = facts_.back();
    }
    for (const Record& x : all) {
      if (c_.options().audit)
        r.audit.push_back(std::string(to_string(x.rule)) + " " + x.box + " " + std::to_string(x.digits) + " " +
                          (x.ok ? "verified" : "failed"));
      if (!x.ok) continue;
      r.max_precision = std::max(r.max_precision, x.digits);
      switch (x.rule) {
        case Rule::pass: ++r.counts.pass; break;
        case Rule::pass_direct: ++r.counts.pass_direct; break;
        case Rule::mono: ++r.counts.mono; break;
        case Rule::glue_split: ++r.counts.glue_split; break;
        case Rule::glue_convex: ++r.counts.glue_convex; break;
        case Rule::ref: ++r.counts.ref; break;
        case Rule::structure: break;
      }
    }
    return r;
  }

  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  const Checker& c_;
  const CertificateList& list_;
  bool parallel_;
  int threads_;
  std::unordered_map<const search::ResultTree*, std::size_t> sizes_;
  std::vector<Box> boxes_;
  std::vector<std::optional<VerifiedFact>> facts_;
  std::vector<std::vector<Record>> records_;
  std::vector<Failure> failures_;
  std::mutex mutex_;
  std::atomic<std::size_t> first_failed_entry_{kNone};
};

CheckReport Checker::check_list_serial(const CertificateList& list) const { return Replay(*this, list, false).run(); }

CheckReport Checker::check_list_parallel(const CertificateList& list) const { return Replay(*this, list, true).run(); }

CheckReport Checker::check_list(const CertificateList& list) const {
  return options_.workers <= 1 ? check_list_serial(list) : check_list_parallel(list);
}

std::string failure_location(const CheckReport& r) {
  return "entry " + std::to_string(r.failed_entry) + " " + search::to_text(r.failed_path);
}

}  // namespace nlv::checker
