#include "nlv/taylor/tape.hpp"

#include <functional>
#include <map>
#include <tuple>
#include <unordered_map>

namespace nlv::taylor {

Tape::Tape(const std::vector<expr::Expr>& outputs) {
  using Key = std::tuple<expr::Op, std::uint32_t, std::uint32_t, std::uint32_t>;
  std::map<Key, std::uint32_t> interned;
  std::map<mpq_class, std::uint32_t> constant_index;
  std::unordered_map<const expr::Node*, std::uint32_t> visited;

  auto emit = [&](const Instr& in) {
    const Key key{in.op, in.a, in.b, in.arg};
    if (auto it = interned.find(key); it != interned.end()) return it->second;
    const auto slot = static_cast<std::uint32_t>(code_.size());
    code_.push_back(in);
    interned.emplace(key, slot);
    return slot;
  };

  std::function<std::uint32_t(const expr::Expr&)> lower = [&](const expr::Expr& e) -> std::uint32_t {
    if (auto it = visited.find(e.id()); it != visited.end()) return it->second;
    Instr in{e.op()};
    switch (e.op()) {
      case expr::Op::constant: {
        auto [it, fresh] = constant_index.try_emplace(e.value(), static_cast<std::uint32_t>(constants_.size()));
        if (fresh) constants_.push_back(e.value());
        in.arg = it->second;
        break;
      }
      case expr::Op::variable: in.arg = static_cast<std::uint32_t>(e.var()); break;
      case expr::Op::pi: break;
      case expr::Op::pow:
        in.a = lower(e.child(0));
        in.arg = e.exponent();
        break;
      default:
        in.a = lower(e.child(0));
        if (e.arity() > 1) in.b = lower(e.child(1));
        break;
    }
    const std::uint32_t slot = emit(in);
    visited.emplace(e.id(), slot);
    return slot;
  };

  outputs_.reserve(outputs.size());
  for (const expr::Expr& e : outputs) outputs_.push_back(lower(e));
}

}  // namespace nlv::taylor
