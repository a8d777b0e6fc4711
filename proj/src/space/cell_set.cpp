#include "dchain/cell_set.hpp"

#include "dchain/errors.hpp"

namespace dchain {

CellSet::CellSet(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}

CellSet::CellSet(std::size_t universe, std::initializer_list<Cell> cells) : CellSet(universe) {
  for (Cell c : cells) insert(c);
}

CellSet CellSet::full(std::size_t universe) {
  CellSet s(universe);
  for (auto& w : s.words_) w = ~std::uint64_t{0};
  s.trim();
  return s;
}

CellSet CellSet::from_cells(std::size_t universe, const std::vector<Cell>& cells) {
  CellSet s(universe);
  for (Cell c : cells) s.insert(c);
  return s;
}

std::size_t CellSet::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += std::popcount(w);
  return n;
}

bool CellSet::empty() const {
  for (auto w : words_)
    if (w) return false;
  return true;
}

void CellSet::insert(Cell c) {
  if (c >= universe_) throw ArgumentError("cell index out of range");
  words_[c >> 6] |= std::uint64_t{1} << (c & 63);
}

void CellSet::erase(Cell c) {
  if (c >= universe_) throw ArgumentError("cell index out of range");
  words_[c >> 6] &= ~(std::uint64_t{1} << (c & 63));
}

void CellSet::clear() {
  for (auto& w : words_) w = 0;
}

void CellSet::check_universe(const CellSet& o) const {
  if (universe_ != o.universe_) throw ArgumentError("cell sets over different universes");
}

void CellSet::trim() {
  if (universe_ % 64 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (universe_ % 64)) - 1;
}

CellSet& CellSet::operator|=(const CellSet& o) {
  check_universe(o);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

CellSet& CellSet::operator&=(const CellSet& o) {
  check_universe(o);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  return *this;
}

CellSet& CellSet::operator-=(const CellSet& o) {
  check_universe(o);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
  return *this;
}

CellSet CellSet::complement() const {
  CellSet s = *this;
  for (auto& w : s.words_) w = ~w;
  s.trim();
  return s;
}

bool CellSet::intersects(const CellSet& o) const {
  check_universe(o);
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i] & o.words_[i]) return true;
  return false;
}

bool CellSet::is_subset_of(const CellSet& o) const {
  check_universe(o);
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i] & ~o.words_[i]) return false;
  return true;
}

Cell CellSet::first() const {
  for (std::size_t w = 0; w < words_.size(); ++w)
    if (words_[w]) return static_cast<Cell>(w * 64 + std::countr_zero(words_[w]));
  return static_cast<Cell>(universe_);
}

std::vector<Cell> CellSet::to_vector() const {
  std::vector<Cell> out;
  out.reserve(count());
  for_each([&](Cell c) { out.push_back(c); });
  return out;
}

}  // namespace dchain
