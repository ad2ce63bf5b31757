#include "loopsim/matrix.hpp"

#include <algorithm>

#include "loopsim/errors.hpp"

namespace loopsim {

UserItemMatrix::UserItemMatrix(std::size_t rows, std::size_t cols,
                               std::vector<std::pair<std::uint32_t, std::uint32_t>> entries)
    : rows_(rows), cols_(cols) {
  for (const auto& [r, c] : entries) {
    if (r >= rows || c >= cols) throw ContractError("matrix entry out of range");
  }
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
  offsets_.assign(rows + 1, 0);
  items_.reserve(entries.size());
  for (const auto& [r, c] : entries) {
    ++offsets_[r + 1];
    items_.push_back(c);
  }
  for (std::size_t r = 0; r < rows; ++r) offsets_[r + 1] += offsets_[r];
}

UserItemMatrix UserItemMatrix::from_interactions(const InteractionDataset& ds,
                                                 std::span<const std::size_t> indices) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;
  entries.reserve(indices.size());
  const auto interactions = ds.interactions();
  for (auto i : indices) entries.emplace_back(interactions[i].user, interactions[i].track);
  return UserItemMatrix(ds.num_users(), ds.num_tracks(), std::move(entries));
}

bool UserItemMatrix::contains(std::size_t r, std::uint32_t c) const {
  auto items = row(r);
  return std::binary_search(items.begin(), items.end(), c);
}

UserItemMatrix UserItemMatrix::transposed() const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;
  entries.reserve(items_.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (auto c : row(r)) entries.emplace_back(c, static_cast<std::uint32_t>(r));
  }
  return UserItemMatrix(cols_, rows_, std::move(entries));
}

}  // namespace loopsim
