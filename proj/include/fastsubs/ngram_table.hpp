#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace fastsubs {

using WordId = std::uint32_t;

inline constexpr WordId kNoWord = 0xffffffffu;

// Open-addressing map from fixed-width word-id keys to dense indices
// [0, size()). Keys are stored contiguously in insertion order, so the
// dense index doubles as a stable handle into side arrays.
class NgramTable {
 public:
  explicit NgramTable(std::size_t width = 1);

  std::size_t width() const { return width_; }
  std::size_t size() const { return count_; }

  std::optional<std::uint32_t> find(std::span<const WordId> key) const;

  // Returns the index of the key and whether it was newly inserted.
  std::pair<std::uint32_t, bool> insert(std::span<const WordId> key);

  std::span<const WordId> key(std::uint32_t index) const {
    return {keys_.data() + static_cast<std::size_t>(index) * width_, width_};
  }

  void reserve(std::size_t n);

 private:
  static constexpr std::uint32_t kEmpty = 0xffffffffu;

  std::size_t slot_for(std::span<const WordId> key) const;
  void rehash(std::size_t slot_count);

  std::size_t width_;
  std::size_t count_ = 0;
  std::vector<WordId> keys_;
  std::vector<std::uint32_t> slots_;
  std::size_t mask_ = 0;
};

std::uint64_t hash_ngram(std::span<const WordId> key);

}  // namespace fastsubs
