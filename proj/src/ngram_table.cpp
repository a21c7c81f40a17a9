#include "fastsubs/ngram_table.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace fastsubs {

std::uint64_t hash_ngram(std::span<const WordId> key) {
  std::uint64_t h = 0x9e3779b97f4a7c15ull ^ key.size();
  for (WordId w : key) {
    h ^= w;
    h *= 0xbf58476d1ce4e5b9ull;
    h ^= h >> 31;
  }
  h ^= h >> 29;
  h *= 0x94d049bb133111ebull;
  h ^= h >> 32;
  return h;
}

NgramTable::NgramTable(std::size_t width) : width_(width) {
  if (width_ == 0) throw std::invalid_argument("NgramTable width must be >= 1");
  rehash(16);
}

void NgramTable::reserve(std::size_t n) {
  keys_.reserve(n * width_);
  std::size_t want = std::bit_ceil(std::max<std::size_t>(16, n * 2));
  if (want > slots_.size()) rehash(want);
}

std::size_t NgramTable::slot_for(std::span<const WordId> key) const {
  std::size_t slot = hash_ngram(key) & mask_;
  while (true) {
    std::uint32_t idx = slots_[slot];
    if (idx == kEmpty) return slot;
    auto stored = this->key(idx);
    if (std::equal(stored.begin(), stored.end(), key.begin())) return slot;
    slot = (slot + 1) & mask_;
  }
}

std::optional<std::uint32_t> NgramTable::find(std::span<const WordId> key) const {
  if (key.size() != width_) return std::nullopt;
  std::uint32_t idx = slots_[slot_for(key)];
  if (idx == kEmpty) return std::nullopt;
  return idx;
}

std::pair<std::uint32_t, bool> NgramTable::insert(std::span<const WordId> key) {
  if (key.size() != width_) throw std::invalid_argument("NgramTable key width mismatch");
  std::size_t slot = slot_for(key);
  if (slots_[slot] != kEmpty) return {slots_[slot], false};
  if ((count_ + 1) * 2 > slots_.size()) {
    rehash(slots_.size() * 2);
    slot = slot_for(key);
  }
  auto idx = static_cast<std::uint32_t>(count_++);
  keys_.insert(keys_.end(), key.begin(), key.end());
  slots_[slot] = idx;
  return {idx, true};
}

void NgramTable::rehash(std::size_t slot_count) {
  slots_.assign(slot_count, kEmpty);
  mask_ = slot_count - 1;
  for (std::uint32_t i = 0; i < count_; ++i) {
    std::size_t slot = hash_ngram(key(i)) & mask_;
    while (slots_[slot] != kEmpty) slot = (slot + 1) & mask_;
    slots_[slot] = i;
  }
}

}  // namespace fastsubs
