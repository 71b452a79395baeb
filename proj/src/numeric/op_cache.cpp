#include "nlv/numeric/op_cache.hpp"

#include <cstring>

namespace nlv::numeric {

std::optional<Interval> OpCache::find(std::string_view key) {
  auto it = index_.find(key);
  if (it == index_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  order_.splice(order_.begin(), order_, it->second);
  return it->second->second;
}

void OpCache::insert(std::string key, const Interval& value) {
  if (capacity_ == 0 || index_.count(key) != 0) return;
  order_.emplace_front(std::move(key), value);
  index_.emplace(order_.front().first, order_.begin());
  if (index_.size() > capacity_) {
    index_.erase(order_.back().first);
    order_.pop_back();
  }
}

void OpCache::clear() {
  index_.clear();
  order_.clear();
  hits_ = misses_ = 0;
}

OpCache& thread_op_cache() {
  thread_local OpCache cache;
  return cache;
}

void append_key(std::string& key, const PreciseFloat& x) {
  const mpz_srcptr m = x.mantissa().get_mpz_t();
  const int size = m->_mp_size;
  const std::int64_t exp = x.exponent();
  char head[sizeof size + sizeof exp];
  std::memcpy(head, &size, sizeof size);
  std::memcpy(head + sizeof size, &exp, sizeof exp);
  key.append(head, sizeof head);
  const std::size_t limbs = mpz_size(m);
  for (std::size_t i = 0; i < limbs; ++i) {
    const mp_limb_t limb = mpz_getlimbn(m, static_cast<mp_size_t>(i));
    key.append(reinterpret_cast<const char*>(&limb), sizeof limb);
  }
}

}  // namespace nlv::numeric
