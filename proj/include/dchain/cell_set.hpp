#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace dchain {

using Cell = std::uint32_t;

// Fixed-universe bitset over cell indices.
class CellSet {
 public:
  CellSet() = default;
  explicit CellSet(std::size_t universe);
  CellSet(std::size_t universe, std::initializer_list<Cell> cells);

  static CellSet full(std::size_t universe);
  static CellSet from_cells(std::size_t universe, const std::vector<Cell>& cells);

  std::size_t universe() const { return universe_; }
  std::size_t count() const;
  bool empty() const;

  bool contains(Cell c) const {
    return c < universe_ && ((words_[c >> 6] >> (c & 63)) & 1u);
  }
  void insert(Cell c);
  void erase(Cell c);
  void clear();

  CellSet& operator|=(const CellSet& o);
  CellSet& operator&=(const CellSet& o);
  CellSet& operator-=(const CellSet& o);
  CellSet complement() const;

  bool intersects(const CellSet& o) const;
  bool is_subset_of(const CellSet& o) const;
  bool operator==(const CellSet& o) const = default;

  // Smallest member, or universe() when empty.
  Cell first() const;
  std::vector<Cell> to_vector() const;

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        int b = std::countr_zero(bits);
        fn(static_cast<Cell>(w * 64 + b));
        bits &= bits - 1;
      }
    }
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  void check_universe(const CellSet& o) const;
  void trim();

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

inline CellSet operator|(CellSet a, const CellSet& b) { return a |= b; }
inline CellSet operator&(CellSet a, const CellSet& b) { return a &= b; }
inline CellSet operator-(CellSet a, const CellSet& b) { return a -= b; }

}  // namespace dchain
