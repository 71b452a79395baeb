#include <doctest.h>

#include <random>

#include "nlv/checker/checker.hpp"
#include "nlv/search/certificate_io.hpp"
#include "nlv/search/search.hpp"
#include "nlv/search/transform.hpp"
#include "support/problems.hpp"

using namespace nlv;
using namespace nlv::checker;
using search::Direction;
using search::NodeKind;
using search::ResultTree;
using search::Side;
using testing::Fixture;

namespace {

const MonoStatus incr1{0, Direction::increasing};
const MonoStatus decr1{0, Direction::decreasing};

CertificateList x_minus_2_list() {
  return search::parse_certificate(
      "[r1]: MONO[1+]{PASS*}\n"
      "[l1]: MONO[1+]{REF(0)}\n"
      "[]: GLUE(1,0){REF(1),REF(0)}\n");
}

Box sub(const Box& root, const char* path) { return search::apply_path(root, search::parse_path(path)); }

}  // namespace

TEST_SUITE("checker") {

TEST_CASE("pass rule") {
  {
    const Fixture f("-1 <= x <= 1 |- x - 2 < 0");
    const Checker c(f.cp, {{200, 5}});
    const VerifiedFact fact = c.check_pass(sub(f.root, "[r1,mr1]"), true, 5);
    CHECK(fact.box() == sub(f.root, "[r1,mr1]"));
    CHECK(fact.precision() == 5);
  }
  {
    const Fixture f("0 <= x <= 1 |- x - atan(x) < 1");
    const Checker c(f.cp, {{200, 5}});
    CHECK_NOTHROW(c.check_pass(f.root, false, 5));
    CHECK_THROWS_AS(c.check_pass(f.root, true, 5), CheckFailure);
  }
  {
    const Fixture f("0 <= x <= 1 |- x - x < 1");
    const Checker c(f.cp, {{200, 5}});
    std::string why;
    CHECK_FALSE(c.pass_holds(f.root, true, 5, &why));
    CHECK_FALSE(why.empty());
    CHECK(c.pass_holds(f.root, false, 5));
  }
  {
    const Fixture f("-1 <= x <= 1 |- 1 - x^2 < 0");
    const Checker c(f.cp, {{200, 5}});
    CHECK_FALSE(c.pass_holds(f.root, false, 5));
  }
}

TEST_CASE("mono rule") {
  const Fixture f("-1 <= x <= 1 |- x - 2 < 0");
  const Checker c(f.cp, {{200, 5}});
  const Box left = sub(f.root, "[l1]");
  const VerifiedFact face = c.check_pass(sub(f.root, "[l1,mr1]"), true, 5);
  const VerifiedFact lifted = c.check_mono(left, {incr1}, face, 5);
  CHECK(lifted.box() == left);
  CHECK(lifted.nodes() == 2);
  // The fact on the lo face does not cover the hi face.
  const VerifiedFact wrong = c.check_pass(sub(f.root, "[l1,ml1]"), true, 5);
  CHECK_THROWS_AS(c.check_mono(left, {incr1}, wrong, 5), CheckFailure);
  CHECK_THROWS_AS(c.check_mono(left, {decr1}, face, 5), CheckFailure);
  // Empty status list: the inner fact must already cover the box.
  const VerifiedFact whole = c.check_pass(left, true, 5);
  CHECK(c.check_mono(left, {}, whole, 5).box() == left);
  CHECK_THROWS_AS(c.check_mono(left, {}, face, 5), CheckFailure);
}

TEST_CASE("decreasing requires a strict sign") {
  const Fixture f("-1 <= x <= 1 |- -x^2 - 1 < 0");
  const Checker c(f.cp, {{200, 5}});
  const Box right = sub(f.root, "[r1]");
  const VerifiedFact at_zero = c.check_pass(sub(f.root, "[r1,ml1]"), true, 5);
  CHECK_THROWS_AS(c.check_mono(right, {decr1}, at_zero, 5), CheckFailure);
  // Away from 0 the derivative is strictly negative.
  const Box inner = sub(f.root, "[r1,r1]");
  const VerifiedFact at_half = c.check_pass(sub(f.root, "[r1,r1,ml1]"), true, 5);
  CHECK(c.check_mono(inner, {decr1}, at_half, 5).box() == inner);
  // And increasing (f' >= 0) holds on the left half including 0.
  CHECK(c.mono_holds(sub(f.root, "[l1]"), {incr1}, 5));
}

TEST_CASE("glue rule") {
  const Fixture f("-1 <= x <= 1 |- x - 2 < 0");
  const Checker c(f.cp, {{200, 5}});
  const VerifiedFact l = c.check_pass(sub(f.root, "[l1]"), true, 5);
  const VerifiedFact r = c.check_pass(sub(f.root, "[r1]"), true, 5);
  const VerifiedFact whole = c.check_glue(f.root, 0, false, l, r, 5);
  CHECK(whole.box() == f.root);
  CHECK_THROWS_AS(c.check_glue(f.root, 0, false, r, l, 5), CheckFailure);

  // [-1,0] and [0.1,1] leave a gap.
  const Fixture gap("0.1 <= x <= 1 |- x - 2 < 0");
  const Checker cg(gap.cp, {{200, 5}});
  const VerifiedFact gr = cg.check_pass(gap.root, true, 5);
  CHECK_THROWS_AS(c.check_glue(f.root, 0, false, l, gr, 5), CheckFailure);
}

TEST_CASE("convex glue on x^2 - 0.5") {
  const Fixture f("-0.6 <= x <= 0.6 |- x^2 - 0.5 < 0");
  const Checker c(f.cp, {{200, 5}});
  const VerifiedFact lo = c.check_pass(search::restrict_box(f.root, 0, Side::lo_face), true, 5);
  const VerifiedFact hi = c.check_pass(search::restrict_box(f.root, 0, Side::hi_face), true, 5);
  CHECK(c.check_glue(f.root, 0, true, lo, hi, 5).box() == f.root);

  // Concave in x: the convexity side condition fails.
  const Fixture g("-0.6 <= x <= 0.6 |- -x^2 - 0.5 < 0");
  const Checker cg(g.cp, {{200, 5}});
  const VerifiedFact glo = cg.check_pass(search::restrict_box(g.root, 0, Side::lo_face), true, 5);
  const VerifiedFact ghi = cg.check_pass(search::restrict_box(g.root, 0, Side::hi_face), true, 5);
  CHECK_THROWS_AS(cg.check_glue(g.root, 0, true, glo, ghi, 5), CheckFailure);
}

TEST_CASE("ref rule uses closed inclusion") {
  const Fixture f("-1 <= x <= 1 |- x - 2 < 0");
  const Checker c(f.cp, {{200, 5}});
  const VerifiedFact right = c.check_pass(sub(f.root, "[r1]"), true, 5);
  CHECK(c.check_ref(sub(f.root, "[l1,mr1]"), right).box() == sub(f.root, "[l1,mr1]"));
  CHECK(c.check_ref(sub(f.root, "[r1]"), right).box() == sub(f.root, "[r1]"));
  CHECK_THROWS_AS(c.check_ref(sub(f.root, "[l1]"), right), CheckFailure);
}

TEST_CASE("x - 2 list is accepted") {
  const Fixture f("-1 <= x <= 1 |- x - 2 < 0");
  const Checker c(f.cp, {{200, 5}});
  const CheckReport r = c.check_list(x_minus_2_list());
  REQUIRE(r.accepted);
  CHECK(r.fact->box() == f.root);
  CHECK(r.entries == 3);
  CHECK(r.counts.pass_direct == 1);
  CHECK(r.counts.mono == 2);
  CHECK(r.counts.glue_split == 1);
  CHECK(r.counts.ref == 3);
  CHECK(r.max_precision == 5);
}

TEST_CASE("tampered lists are rejected with their location") {
  const Fixture f("-1 <= x <= 1 |- x - 2 < 0");
  const Checker c(f.cp, {{200, 5}});
  {
    CertificateList bad = x_minus_2_list();
    bad[1].tree = ResultTree::mono({incr1}, ResultTree::reference(1));
    const CheckReport r = c.check_list(bad);
    CHECK_FALSE(r.accepted);
    CHECK(r.failed_entry == 1);
    CHECK(failure_location(r).rfind("entry 1 [l1", 0) == 0);
  }
  {
    // A pass claimed on [0,2] for x - 2 < 0: the bound 0 is not negative.
    const Fixture wide("0 <= x <= 2 |- x - 2 < 0");
    const Checker cw(wide.cp, {{200, 5}});
    const CheckReport r = cw.check_list(search::parse_certificate("[]: PASS\n"));
    CHECK_FALSE(r.accepted);
    CHECK(r.failed_entry == 0);
    CHECK(r.failure.find("not") != std::string::npos);
  }
  {
    CertificateList bad = x_minus_2_list();
    bad[0].path = search::parse_path("[l1]");
    const CheckReport r = c.check_list(bad);
    CHECK_FALSE(r.accepted);
  }
  {
    CertificateList bad = x_minus_2_list();
    bad.pop_back();
    CHECK_FALSE(c.check_list(bad).accepted);
  }
}

TEST_CASE("audit log") {
  const Fixture f("-1 <= x <= 1 |- x - 2 < 0");
  CheckOptions o{{200, 5}};
  o.audit = true;
  const Checker c(f.cp, o);
  const CheckReport r = c.check_list(x_minus_2_list());
  REQUIRE(r.audit.size() == r.counts.total());
  for (const std::string& line : r.audit) {
    CHECK(line.find(" verified") != std::string::npos);
    CHECK(line.find('[') != std::string::npos);
  }
  CHECK(r.audit[0].rfind("MONO [0,1] 5 verified", 0) == 0);
  CHECK(r.audit[1].rfind("PASS* [1,1] 5 verified", 0) == 0);
}

TEST_CASE("serial and parallel replay give identical reports") {
  std::mt19937_64 rng(61);
  int compared = 0;
  for (int k = 0; k < 30; ++k) {
    const Fixture f(testing::random_problem(rng, k % 2 == 0));
    search::SearchParams sp;
    sp.max_depth = 20;
    sp.allow_pass_mono = false;
    const auto out = search::certificate_search(f.cp, f.root, sp);
    if (out.status != search::SearchStatus::verified) continue;
    CertificateList list = search::transform_certificate(out.tree, f.root);
    // Tamper with one leaf half of the time so failures are compared too.
    if (k % 2 == 1 && list.back().tree->kind == NodeKind::glue)
      list.back().tree = ResultTree::glue(list.back().tree->coord, false, ResultTree::pass(true),
                                          list.back().tree->children[1]);
    CheckOptions o{{200, 5}};
    o.audit = true;
    const CheckReport s = Checker(f.cp, o).check_list_serial(list);
    o.workers = 4;
    o.task_depth = 30;
    const CheckReport p = Checker(f.cp, o).check_list_parallel(list);
    CHECK(s.accepted == p.accepted);
    CHECK(s.counts == p.counts);
    CHECK(s.audit == p.audit);
    CHECK(s.failure == p.failure);
    CHECK(s.failed_path == p.failed_path);
    CHECK(s.max_precision == p.max_precision);
    ++compared;
  }
  CHECK(compared >= 10);
}

TEST_CASE("cache does not change results") {
  const Fixture f("0 <= x <= 2; 0 <= y <= 2 |- x*y - atan(x + y) < 4");
  search::SearchParams sp;
  const auto out = search::certificate_search(f.cp, f.root, sp);
  REQUIRE(out.status == search::SearchStatus::verified);
  const CertificateList list = search::transform_certificate(out.tree, f.root);
  CheckOptions o{{200, 5}};
  o.audit = true;
  const CheckReport cached = Checker(f.cp, o).check_list(list);
  o.use_cache = false;
  const CheckReport plain = Checker(f.cp, o).check_list(list);
  CHECK(cached.accepted);
  CHECK(cached.audit == plain.audit);
}

TEST_CASE("annotation of a constant goal") {
  const Fixture f("0 <= x <= 1; 0 <= y <= 1 |- -1 < 0");
  const Checker c(f.cp, {{200, 5}});
  const CertificateList list = search::parse_certificate("[]: GLUE(1,0){PASS,GLUE(2,0){PASS,PASS}}\n");
  const CertificateList ann = annotate_adaptive(c, list, 5);
  testing::walk(ann[0].tree, f.root, [](const search::Tree& t, const Box&) {
    if (t->kind != NodeKind::pass) return;
    CHECK(t->precision == 1);
    CHECK(t->direct);
  });
  CHECK(c.check_list(ann).accepted);
  CHECK(c.check_list(ann).max_precision == 1);
}

TEST_CASE("annotation of x - atan x - 1") {
  const Fixture f("0 <= x <= 1 |- x - atan(x) < 1");
  const Checker c(f.cp, {{200, 5}});
  const CertificateList ann = annotate_adaptive(c, search::parse_certificate("[]: PASS\n"), 5);
  REQUIRE(ann.size() == 1);
  CHECK(ann[0].tree->precision >= 1);
  CHECK(ann[0].tree->precision <= 5);
  const CheckReport r = c.check_list(ann);
  CHECK(r.accepted);
  CHECK(r.max_precision == ann[0].tree->precision);
}

TEST_CASE("annotation falls back to the maximum") {
  // 1 + 200^-4 needs exactly five base-200 digits.
  const Fixture f("0 <= x <= 1 |- x - (1 + 1/1600000000) < 0");
  const Checker c(f.cp, {{200, 5}});
  const CertificateList list = search::parse_certificate("[]: PASS\n");
  REQUIRE(c.check_list(list).accepted);
  for (int p = 1; p < 5; ++p) CHECK_FALSE(c.pass_holds(f.root, false, p));
  const CertificateList ann = annotate_adaptive(c, list, 5);
  CHECK(ann[0].tree->precision == 5);
  CHECK(c.check_list(ann).accepted);
}

TEST_CASE("annotated replay accepts what default replay accepts") {
  std::mt19937_64 rng(67);
  int compared = 0;
  for (int k = 0; k < 30; ++k) {
    const Fixture f(testing::random_problem(rng, k % 2 == 1));
    search::SearchParams sp;
    sp.max_depth = 20;
    const auto out = search::certificate_search(f.cp, f.root, sp);
    if (out.status != search::SearchStatus::verified) continue;
    CertificateList list;
    try {
      list = search::transform_certificate(out.tree, f.root);
    } catch (const search::TransformError&) {
      continue;
    }
    const Checker c(f.cp, {{200, 5}});
    if (!c.check_list(list).accepted) continue;
    const CertificateList ann = annotate_adaptive(c, list, 5);
    const CheckReport r = c.check_list(ann);
    CHECK(r.accepted);
    CHECK(r.max_precision <= 5);
    ++compared;
  }
  CHECK(compared >= 10);
}

TEST_CASE("precision monotonicity is monitored") {
  // Outward rounding makes violations rare but not impossible; they are
  // reported, not asserted.
  std::mt19937_64 rng(71);
  std::size_t checks = 0, violations = 0;
  for (int k = 0; k < 20; ++k) {
    const Fixture f(testing::random_problem(rng, k % 2 == 0));
    const Checker c(f.cp, {{200, 8}});
    search::SearchParams sp;
    sp.max_depth = 12;
    sp.allow_pass_mono = false;
    const auto out = search::certificate_search(f.cp, f.root, sp);
    if (out.status != search::SearchStatus::verified) continue;
    testing::walk(out.tree, f.root, [&](const search::Tree& t, const Box& box) {
      if (t->kind != NodeKind::pass) return;
      bool held = false;
      for (int p = 1; p <= 8; ++p) {
        const bool now = c.pass_holds(box, t->direct, p);
        if (held && !now) ++violations;
        held = held || now;
        ++checks;
      }
    });
  }
  MESSAGE("precision monotonicity: " << violations << " violations in " << checks << " checks");
  CHECK(checks > 0);
}

TEST_CASE("facts cannot be forged from outside the rules") {
  static_assert(!std::is_default_constructible_v<VerifiedFact>);
  static_assert(!std::is_constructible_v<VerifiedFact, Box, int, std::size_t>);
  CHECK(true);
}

}  // TEST_SUITE
