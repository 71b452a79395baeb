#pragma once

#include <cstddef>
#include <list>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "nlv/numeric/interval.hpp"

namespace nlv::numeric {

/// Bounded LRU memo of rigorous interval operations, keyed by operation code,
/// precision, and the exact operand digits. One instance per thread.
class OpCache {
 public:
  explicit OpCache(std::size_t capacity = 1u << 16) : capacity_(capacity) {}

  std::optional<Interval> find(std::string_view key);
  void insert(std::string key, const Interval& value);
  void clear();

  std::size_t size() const { return index_.size(); }
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  using Entry = std::pair<std::string, Interval>;
  std::size_t capacity_;
  std::list<Entry> order_;  // most recent first
  std::unordered_map<std::string_view, std::list<Entry>::iterator> index_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

OpCache& thread_op_cache();

/// Appends a canonical byte encoding of x to key.
void append_key(std::string& key, const PreciseFloat& x);

}  // namespace nlv::numeric
